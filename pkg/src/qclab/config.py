"""
Runtime settings for qclab.

Settings come from ``QCLAB_*`` environment variables (a ``.env`` file in the
working directory is loaded first). Library functions take explicit keyword
overrides that default to these values.
"""

import logging
import os
from functools import lru_cache

from dotenv import load_dotenv
from pydantic import BaseModel, Field, ValidationError

from src.qclab.errors import ConfigError

load_dotenv()

logger = logging.getLogger("qclab.config")

ENV_PREFIX = "QCLAB_"

TOOL_NAME = "qclab"
TOOL_VERSION = "0.1.0"


class Settings(BaseModel):
    solver_tolerance: float = Field(1e-10, gt=0)
    max_iterations: int = Field(100_000, gt=0)
    # Accepted residual when the line search can no longer decrease the energy.
    stagnation_tolerance: float = Field(1e-6, gt=0)
    exact_profile_limit: int = Field(20, gt=0, le=32)
    exact_ferrand_limit: int = Field(12, gt=0)
    bch_max_step: int = Field(6, gt=0)
    path_beam_width: int = Field(8, gt=0)
    log_level: str = "INFO"
    jobs: int = Field(1, gt=0)


def settings_from_env() -> Settings:
    """Build settings from the environment, ignoring unset variables."""
    values = {}
    for name in Settings.model_fields:
        raw = os.getenv(ENV_PREFIX + name.upper())
        if raw is not None:
            values[name] = raw
    try:
        settings = Settings(**values)
    except ValidationError as e:
        raise ConfigError(f"Invalid {ENV_PREFIX}* environment settings: {e}") from e
    if values:
        logger.debug(f"Settings overridden from environment: {sorted(values)}")
    return settings


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    return settings_from_env()
