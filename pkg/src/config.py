"""Application configuration using Pydantic settings."""

import os

from pydantic import field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Application settings loaded from environment variables."""

    # Application
    APP_NAME: str = "TreeHop"
    APP_VERSION: str = "0.1.0"

    # Logging (always stderr, stdout is reserved for --json output)
    LOG_LEVEL: str = "INFO"
    LOG_FORMAT: str = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"

    # Parallelism cap for per-example gradients and per-query evaluation
    # 0 means one worker per CPU
    TREEHOP_THREADS: int = 0

    # Store
    DEFAULT_DIM: int = 1024  # BGE-m3 dense embedding size
    NORMALIZE_ON_INGEST: bool = True

    # Controller
    DEFAULT_TOP_K: int = 5
    DEFAULT_HOPS: int = 2
    NORMALIZE_NEXT_QUERY: bool = False

    # Reproducibility
    DEFAULT_SEED: int = 42

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=True,
        extra="ignore",
    )

    @field_validator("TREEHOP_THREADS")
    @classmethod
    def check_threads(cls, v: int) -> int:
        """Reject negative thread caps."""
        if v < 0:
            raise ValueError("TREEHOP_THREADS must be >= 0 (0 = auto)")
        return v

    @field_validator("DEFAULT_DIM", "DEFAULT_TOP_K", "DEFAULT_HOPS")
    @classmethod
    def check_positive(cls, v: int) -> int:
        """Dimensions, K and hop counts are strictly positive."""
        if v < 1:
            raise ValueError("must be >= 1")
        return v

    def worker_count(self) -> int:
        """Resolve TREEHOP_THREADS into an actual worker count.

        Returns:
            Number of worker threads to use (at least 1)
        """
        if self.TREEHOP_THREADS > 0:
            return self.TREEHOP_THREADS
        return os.cpu_count() or 1


# Global settings instance
settings = Settings()
