"""Defines the application settings."""

import logging
from abc import ABC

from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


class FreeProductsBaseSettings(BaseSettings, ABC):
    """Defines common configuration for settings."""

    model_config = SettingsConfigDict(
        case_sensitive=False,
        env_nested_delimiter="__",
        protected_namespaces=(),
        extra="ignore",
        populate_by_name=True,
    )


class EngineSettings(FreeProductsBaseSettings):
    """Engine Settings.

    Enumeration ceilings protecting desk-scale runs from combinatorial explosion.
    """

    model_config = SettingsConfigDict(env_prefix="FREE_PRODUCTS_ENGINE_")

    stream_ceiling: int = Field(default=14, gt=0)
    direct_ceiling: int = Field(default=12, gt=0)
    enumeration_ceiling: int = Field(default=16, gt=0)


class ReportSettings(FreeProductsBaseSettings):
    """Report Settings.

    Controls decimal rendering of reports and the CLI log level.
    """

    model_config = SettingsConfigDict(env_prefix="FREE_PRODUCTS_REPORT_")

    precision: int = Field(default=12, ge=1, le=50)
    log_level: str = Field(default="WARNING")

    @field_validator("log_level")
    @classmethod
    def validate_log_level(cls, v: str) -> str:
        """Validate if log_level is a known logging level."""
        level = v.upper()
        if isinstance(logging.getLevelName(level), int):
            return level

        raise ValueError(f"'log_level' must be a logging level name, got '{v}'")


class ApplicationSettings(FreeProductsBaseSettings):
    """Application settings."""

    engine: EngineSettings = Field(default_factory=EngineSettings)
    report: ReportSettings = Field(default_factory=ReportSettings)
