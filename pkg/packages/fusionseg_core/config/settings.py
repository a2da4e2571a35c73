"""Centralized environment settings using Pydantic Settings

Nothing here is required; every value has a default. Run-specific
parameters live in RunConfig files, not in the environment.
"""

from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Process-level settings loaded from FUSIONSEG_* environment variables"""

    model_config = SettingsConfigDict(
        env_prefix="FUSIONSEG_",
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore",
    )

    # Logging
    debug: bool = False

    # Worker threads for per-study work when --jobs is not given
    jobs: int = 1

    # Whether subcommands may write into non-empty output directories
    force: bool = False


# Global settings instance
settings = Settings()
