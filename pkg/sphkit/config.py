"""Toolkit configuration using pydantic-settings."""
from pathlib import Path
from typing import Any, Optional, Union

import numpy as np
from dotenv import dotenv_values
from pydantic import Field, ValidationError
from pydantic_settings import BaseSettings, SettingsConfigDict

from sphkit.errors import ConfigError


class ToolkitSettings(BaseSettings):
    """Numerical tolerances, caps and output options, overridable via SPHKIT_* variables."""

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        env_prefix="SPHKIT_",
        case_sensitive=False,
        extra="ignore",
    )

    # Numerical tolerances
    tol: float = Field(default=1e-8, gt=0)
    cluster_tol: float = Field(default=1e-6, gt=0)
    r_squared_min: float = Field(default=0.99, gt=0, le=1)
    projector_gap: float = Field(default=1.0, gt=0)

    # Search and truncation caps
    degree_cap: int = Field(default=4, ge=1, le=8)
    search_cap: int = Field(default=32, ge=1)
    model_order_max: int = Field(default=12, ge=1)

    # Reproducibility and output
    seed: int = 0
    out_dir: str = "out"
    log_level: str = "INFO"
    log_json: bool = False

    @property
    def tail_tolerance(self) -> float:
        """Absolute bound required of every truncated integral tail."""
        return 1e-10

    def rng(self) -> np.random.Generator:
        """Seeded generator; every sampling step draws from one of these."""
        return np.random.default_rng(self.seed)


def load_settings(config_file: Optional[Union[str, Path]] = None, **overrides: Any) -> ToolkitSettings:
    """Build settings from defaults, environment, a key=value file and explicit overrides.

    Later sources win. Overrides equal to ``None`` are ignored so that unset CLI
    flags do not clobber file values.
    """
    values: dict = {}
    if config_file is not None:
        path = Path(config_file)
        if not path.exists():
            raise ConfigError(f"Config file not found: {path}", {"path": str(path)})
        for key, value in dotenv_values(path).items():
            name = key.lower()
            if name not in ToolkitSettings.model_fields:
                raise ConfigError(f"Unknown config key: {key}", {"key": key})
            values[name] = value
    values.update({k: v for k, v in overrides.items() if v is not None})
    try:
        return ToolkitSettings(**values)
    except ValidationError as exc:
        raise ConfigError("Invalid configuration", {"errors": exc.errors()}) from exc


# Global settings instance
settings = ToolkitSettings()
