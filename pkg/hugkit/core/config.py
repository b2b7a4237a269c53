"""
Application configuration settings.
Uses environment variables (prefix-free, case sensitive) and an optional .env file.
"""
from typing import List
from pydantic_settings import BaseSettings, SettingsConfigDict
from functools import lru_cache

from hugkit import __version__


class Settings(BaseSettings):
    """
    Application settings loaded from environment variables.
    """
    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=True,
        extra="ignore",
    )

    # Basic App Settings
    PROJECT_NAME: str = "HUG Lab"
    VERSION: str = __version__
    DESCRIPTION: str = "Hyperspherical uniformity gap losses and neural collapse diagnostics"
    API_V1_STR: str = "/api/v1"

    # Environment Settings
    ENVIRONMENT: str = "development"  # development, staging, production
    DEBUG: bool = True
    LOG_LEVEL: str = "INFO"  # DEBUG, INFO, WARNING, ERROR, CRITICAL

    # CORS Settings
    BACKEND_CORS_ORIGINS: List[str] = ["http://localhost:3000", "http://localhost:8080"]

    # Experiment Settings
    OUTPUT_DIR: str = "runs"
    DEFAULT_SEED: int = 0
    DEFAULT_RESTARTS: int = 8
    SWEEP_WORKERS: int = 4
    STATE_SCHEMA_VERSION: int = 1

    # Numerics
    ENERGY_PARALLEL: bool = False  # numba reduction, not bit-reproducible
    BRUTE_FORCE_RESTARTS: int = 64
    BRUTE_FORCE_STEPS: int = 2000

    @property
    def is_production(self) -> bool:
        """Check if running in production environment."""
        return self.ENVIRONMENT == "production"

    @property
    def is_development(self) -> bool:
        """Check if running in development environment."""
        return self.ENVIRONMENT == "development"


@lru_cache()
def get_settings() -> Settings:
    """
    Get cached settings instance.
    Uses LRU cache to avoid repeated environment variable reads.
    """
    return Settings()


# Global settings instance
settings = get_settings()
