from functools import lru_cache
from pathlib import Path
from typing import Optional

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict

# Resolve repo root and .env path robustly
ENV_PATH = Path(__file__).resolve().parents[2] / ".env"


class Settings(BaseSettings):
    # App
    APP_NAME: str = "WindowLab"
    DEBUG: bool = False
    LOG_FILE: Optional[str] = Field(default=None, description="Optional log file, ignored in DEBUG mode")

    # Replication
    LAB_THREADS: Optional[int] = Field(default=None, ge=1, description="Worker count override (default: os.cpu_count())")
    LAB_SEED: int = Field(default=7, ge=0, description="Default master seed")
    LAB_REPLICAS: int = Field(default=10_000, ge=2, description="Default replica count")
    CONFIDENCE_MULTIPLIER: float = Field(default=3.0, gt=0, description="Standard errors per confidence half-width")

    # Numerics
    QUADRATURE_TOL: float = Field(default=1e-10, gt=0, description="Absolute tolerance for overlap quadratures")
    MAX_REJECTION_TRIES: int = Field(default=1_000_000, ge=1, description="Rejection sampler budget before giving up")

    # Artifacts
    OUTPUT_DIR: str = Field(default="results", description="Directory for CSV/JSON/SVG artifacts")

    model_config = SettingsConfigDict(
        env_file=str(ENV_PATH),
        env_file_encoding="utf-8",
        env_ignore_empty=True,
        extra="ignore",
    )


@lru_cache()
def get_settings() -> Settings:
    return Settings()
