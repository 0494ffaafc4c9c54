import os
from dataclasses import dataclass
from pathlib import Path

from dotenv import load_dotenv

from errors import ConfigError

BUNDLED_DATA_DIR = Path(__file__).resolve().parent / "data"


@dataclass
class DatabaseConfig:
    dsn: str | None


@dataclass
class CacheConfig:
    backend: str
    path: Path


@dataclass
class AppConfig:
    db: DatabaseConfig
    cache: CacheConfig
    output_format: str
    jobs: int
    data_dir: Path
    log_level: str
    audit: bool


def _choice(name: str, default: str, allowed: tuple) -> str:
    value = os.getenv(name, default).strip().lower()
    if value not in allowed:
        raise ConfigError(f"{name} must be one of {', '.join(allowed)}; got {value!r}")
    return value


def _positive_int(name: str, default: int) -> int:
    raw = os.getenv(name, str(default))
    try:
        value = int(raw)
    except ValueError:
        raise ConfigError(f"{name} must be an integer; got {raw!r}")
    if value < 1:
        raise ConfigError(f"{name} must be at least 1; got {value}")
    return value


def load_config() -> AppConfig:
    # a local .env is optional; real environment variables win
    load_dotenv(override=False)
    return AppConfig(
        db=DatabaseConfig(dsn=os.getenv("RK_DB_DSN")),
        cache=CacheConfig(
            backend=_choice("RK_CACHE_BACKEND", "file", ("file", "postgres")),
            path=Path(os.getenv("RK_CACHE_PATH", ".reflexkit_cache")),
        ),
        output_format=_choice("RK_OUTPUT_FORMAT", "text", ("text", "json")),
        jobs=_positive_int("RK_JOBS", 1),
        data_dir=Path(os.getenv("RK_DATA_DIR", str(BUNDLED_DATA_DIR))),
        log_level=os.getenv("RK_LOG_LEVEL", "WARNING").upper(),
        audit=_choice("RK_AUDIT", "on", ("on", "off")) == "on",
    )
