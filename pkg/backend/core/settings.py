"""Process-level settings read from the environment."""
from __future__ import annotations

from functools import lru_cache
from pathlib import Path

from pydantic_settings import BaseSettings, SettingsConfigDict

CONFIG_DIR = Path(__file__).resolve().parent.parent / "config"


class Settings(BaseSettings):
    model_config = SettingsConfigDict(env_prefix="SOCINFER_", env_file=".env", extra="ignore")

    logs_root: Path = Path("logs")
    log_level: str = "INFO"
    pac_config: Path = CONFIG_DIR / "pac.default.yaml"
    harness_config: Path = CONFIG_DIR / "harness.default.yaml"
    n_jobs: int = 1
    api_cors_origins: str = ""


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    return Settings()


def reset_settings() -> None:
    get_settings.cache_clear()
