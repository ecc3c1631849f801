import logging
import sys
from typing import Optional
from contextvars import ContextVar

from utils.config import get_settings


# Context variable for the query being evaluated (class node plus evidence)
query_context: ContextVar[Optional[str]] = ContextVar('query_context', default=None)


class _QueryContextFilter(logging.Filter):
    def filter(self, record: logging.LogRecord) -> bool:
        query = query_context.get()
        record.query = f"[{query}] " if query else ""
        return True


class Logger:
    def __init__(
        self,
        name: str = "credal",
        level: Optional[str] = None,
        log_to_file: Optional[bool] = None,
        log_file_path: Optional[str] = None,
    ):
        settings = get_settings()
        if level is None:
            level = settings.log_level
        if log_file_path is None:
            log_file_path = settings.log_file
        if log_to_file is None:
            log_to_file = log_file_path is not None

        self.logger = logging.getLogger(name)
        self.logger.setLevel(self._get_log_level(level))
        self.logger.propagate = False  # Prevent double logging

        # Loggers are process-wide singletons; attach handlers only once
        if self.logger.handlers:
            return

        formatter = logging.Formatter(
            fmt="%(asctime)s - %(name)s - %(levelname)s - %(query)s%(message)s",
            datefmt="%Y-%m-%d %H:%M:%S",
        )
        context_filter = _QueryContextFilter()

        # stdout carries the reports, so diagnostics go to stderr
        stream_handler = logging.StreamHandler(sys.stderr)
        stream_handler.setFormatter(formatter)
        stream_handler.addFilter(context_filter)
        self.logger.addHandler(stream_handler)

        if log_to_file and log_file_path:
            file_handler = logging.FileHandler(log_file_path)
            file_handler.setFormatter(formatter)
            file_handler.addFilter(context_filter)
            self.logger.addHandler(file_handler)

    def _get_log_level(self, level_str: str) -> int:
        return {
            "DEBUG": logging.DEBUG,
            "INFO": logging.INFO,
            "WARNING": logging.WARNING,
            "ERROR": logging.ERROR,
            "CRITICAL": logging.CRITICAL,
        }.get(level_str.upper(), logging.INFO)

    def debug(self, msg: str, *args, **kwargs):
        self.logger.debug(msg, *args, **kwargs)

    def info(self, msg: str, *args, **kwargs):
        self.logger.info(msg, *args, **kwargs)

    def warning(self, msg: str, *args, **kwargs):
        self.logger.warning(msg, *args, **kwargs)

    def error(self, msg: str, *args, **kwargs):
        self.logger.error(msg, *args, **kwargs)

    def set_query(self, description: str):
        """Tag subsequent log lines in this context with a query description."""
        return query_context.set(description)

    def reset_query(self, token) -> None:
        query_context.reset(token)
