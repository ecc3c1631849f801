"""Command-line entry point.

Exit codes: 0 success, 1 unexpected failure, 2 unreadable file or query,
3 invalid model or query, 4 enumeration cap exceeded. Command-line usage
errors reported by argparse count as invalid queries (3), not as parse errors.
"""

import argparse
import sys
from typing import Optional, Sequence

from cli.command_registry import CommandRegistry, create_default_command_registry
from utils.errors import (
    CredalError,
    EnumerationCapExceeded,
    NetworkFormatError,
)
from utils.logger import Logger

logger = Logger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_PARSE_ERROR = 2
EXIT_VALIDATION_ERROR = 3
EXIT_CAP_EXCEEDED = 4


def exit_code_for(error: Exception) -> int:
    if isinstance(error, NetworkFormatError):
        return EXIT_PARSE_ERROR
    if isinstance(error, EnumerationCapExceeded):
        return EXIT_CAP_EXCEEDED
    if isinstance(error, CredalError):
        return EXIT_VALIDATION_ERROR
    return EXIT_FAILURE


def build_parser(registry: Optional[CommandRegistry] = None) -> argparse.ArgumentParser:
    registry = registry or create_default_command_registry()
    parser = argparse.ArgumentParser(
        prog="credal",
        description="Credal classification of Bayesian and credal networks under unknown missingness.",
    )
    return registry.build_parser(parser)


def main(argv: Optional[Sequence[str]] = None) -> int:
    registry = create_default_command_registry()
    try:
        args = build_parser(registry).parse_args(argv)
    except SystemExit as exit_request:
        # argparse has already printed usage or help
        return EXIT_OK if exit_request.code in (0, None) else EXIT_VALIDATION_ERROR
    arguments = {key: value for key, value in vars(args).items() if key != "command"}
    try:
        text = registry.call_command(args.command, **arguments)
    except CredalError as error:
        code = exit_code_for(error)
        logger.error(f"{args.command} failed ({type(error).__name__}): {error}")
        print(f"error: {error}", file=sys.stderr)
        return code
    print(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
