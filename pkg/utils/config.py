import os
from functools import lru_cache
from typing import Optional

from dotenv import load_dotenv
from pydantic import BaseModel, Field

ENV_FILE = os.getenv("CREDAL_ENV")
load_dotenv(dotenv_path=ENV_FILE)


class EngineSettings(BaseModel):
    tolerance: float = Field(default=1e-9, gt=0)
    enumeration_cap: int = Field(default=2**20, ge=1)
    oracle_cap: int = Field(default=2**16, ge=1)
    polytope_margin: float = Field(default=1e-9, ge=0)
    log_level: str = "INFO"
    log_file: Optional[str] = None


_ENV_KEYS = {
    "tolerance": "CREDAL_TOLERANCE",
    "enumeration_cap": "CREDAL_ENUMERATION_CAP",
    "oracle_cap": "CREDAL_ORACLE_CAP",
    "polytope_margin": "CREDAL_POLYTOPE_MARGIN",
    "log_level": "LOG_LEVEL",
    "log_file": "CREDAL_LOG_FILE",
}


@lru_cache(maxsize=1)
def get_settings() -> EngineSettings:
    """Read engine settings from the environment (after loading the dotenv file)."""
    values = {
        field: os.environ[key]
        for field, key in _ENV_KEYS.items()
        if os.environ.get(key)
    }
    return EngineSettings.model_validate(values)
