"""Application configuration."""
import os
from typing import Optional

from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Library and CLI settings from environment variables (prefix DYNAHEIGHT_)."""

    # Exact arithmetic
    PRECISION_BITS: int = 256
    REFINE_ATTEMPTS: int = 6  # precision doublings before giving up
    ITERATE_DEGREE_CAP: int = 4096
    ORBIT_BITS_CAP: int = 1 << 22  # bit size of exact orbit values

    # Dynamics
    PERIOD_CAP: int = 64
    TARGET_ERROR: float = 1e-9
    K_MAX: Optional[int] = None  # default r * d per call

    # Experiments
    SAMPLE_PERIOD_MAX: int = 2
    MAX_VARIETIES: int = 64
    SEED: int = 0
    JOBS: Optional[int] = None

    # Logging
    LOG_LEVEL: str = "INFO"
    LOG_FORMAT: str = "json"  # json or text

    model_config = SettingsConfigDict(
        env_prefix="DYNAHEIGHT_",
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=True,
        extra="ignore",
    )

    def validate(self):
        """Validate critical settings."""
        if self.PRECISION_BITS < 53:
            raise ValueError("PRECISION_BITS must be at least 53")

        if self.TARGET_ERROR <= 0:
            raise ValueError("TARGET_ERROR must be positive")

        if self.PERIOD_CAP < 1 or self.ITERATE_DEGREE_CAP < 2:
            raise ValueError("PERIOD_CAP and ITERATE_DEGREE_CAP must be positive caps")

        if self.LOG_FORMAT not in ("json", "text"):
            raise ValueError("LOG_FORMAT must be 'json' or 'text'")

    @property
    def jobs(self) -> int:
        """Worker count for experiment fan-out."""
        return self.JOBS or os.cpu_count() or 1


# Global settings instance
settings = Settings()
