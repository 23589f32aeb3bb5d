import os
from dataclasses import dataclass
from pathlib import Path

from dotenv import load_dotenv

load_dotenv()


DEFAULT_SEED = 20240601
DEFAULT_TOLERANCE = 1e-9


@dataclass(frozen=True)
class Settings:
    mode: str = "exact"
    tolerance: float = DEFAULT_TOLERANCE
    seed: int = DEFAULT_SEED
    workers: int = 1
    log_level: str = "WARNING"
    cache_db: Path | None = None
    cache_days: int = 30


def _int_env(name: str, default: int) -> int:
    raw = os.environ.get(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        return int(raw)
    except ValueError:
        raise RuntimeError(f"{name} must be an integer, got {raw!r}")


def _float_env(name: str, default: float) -> float:
    raw = os.environ.get(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        value = float(raw)
    except ValueError:
        raise RuntimeError(f"{name} must be a number, got {raw!r}")
    if value <= 0:
        raise RuntimeError(f"{name} must be positive")
    return value


def load_settings() -> Settings:
    mode = os.environ.get("QUIVER_MODE", "exact").strip().lower()
    if mode not in ("exact", "numeric"):
        raise RuntimeError("QUIVER_MODE must be 'exact' or 'numeric'")

    workers = _int_env("QUIVER_WORKERS", 1)
    if workers < 1:
        raise RuntimeError("QUIVER_WORKERS must be at least 1")

    cache_db = os.environ.get("QUIVER_CACHE_DB")

    return Settings(
        mode=mode,
        tolerance=_float_env("QUIVER_TOLERANCE", DEFAULT_TOLERANCE),
        seed=_int_env("QUIVER_SEED", DEFAULT_SEED),
        workers=workers,
        log_level=os.environ.get("QUIVER_LOG_LEVEL", "WARNING").upper(),
        cache_db=Path(cache_db) if cache_db else None,
        cache_days=_int_env("QUIVER_CACHE_DAYS", 30),
    )
