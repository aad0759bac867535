"""
Runtime configuration for the CSSD tools.

Settings are read from environment variables (a local ``.env`` file is loaded
first). Values are validated once and cached; call ``reload_settings`` after
changing the environment.
"""

import os
import logging
from functools import lru_cache
from typing import Optional

from dotenv import load_dotenv
from pydantic import BaseModel, Field, PositiveFloat, PositiveInt, field_validator

load_dotenv()

logger = logging.getLogger(__name__)

DEFAULT_MESH_RATIO_THRESHOLD = 1e6


class CssdSettings(BaseModel):
    """Environment-driven settings."""

    threads: PositiveInt = Field(default_factory=lambda: os.cpu_count() or 1)
    mesh_ratio_threshold: PositiveFloat = DEFAULT_MESH_RATIO_THRESHOLD
    log_level: str = "INFO"
    log_dir: Optional[str] = None

    @field_validator("log_level")
    @classmethod
    def _known_level(cls, value: str) -> str:
        level = value.upper()
        if not isinstance(logging.getLevelName(level), int):
            raise ValueError(f"Unknown log level: {value}")
        return level

    @property
    def log_level_value(self) -> int:
        return logging.getLevelName(self.log_level)

    @classmethod
    def from_env(cls) -> "CssdSettings":
        """
        Build settings from the CSSD_* environment variables.

        Returns:
            Validated settings; unset variables keep their defaults.
        """
        env = {
            "threads": os.getenv("CSSD_THREADS"),
            "mesh_ratio_threshold": os.getenv("CSSD_MESH_RATIO_THRESHOLD"),
            "log_level": os.getenv("CSSD_LOG_LEVEL"),
            "log_dir": os.getenv("CSSD_LOG_DIR"),
        }
        provided = {key: value for key, value in env.items() if value not in (None, "")}
        return cls(**provided)


@lru_cache(maxsize=1)
def get_settings() -> CssdSettings:
    """Get the cached settings instance."""
    return CssdSettings.from_env()


def reload_settings() -> CssdSettings:
    """Drop the cached settings and read the environment again."""
    get_settings.cache_clear()
    return get_settings()
