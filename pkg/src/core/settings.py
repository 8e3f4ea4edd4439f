#!/usr/bin/env python3
"""
settings.py

Environment-driven configuration for dyniso.

Values are read from the process environment after loading an optional
`.env` file with `python-dotenv`. Every variable has a default, so a bare
checkout runs without any configuration.

Environment
-----------
DYNISO_THREADS : int
    Worker cap for fanning out τ candidates (default 1, sequential).
DYNISO_DEBUG : bool
    Enables the expensive debug assertions (default false).
DYNISO_LOG_LEVEL : str
    Level of the stderr log sink (default WARNING).
DYNISO_LOG_FILE : str
    Optional path of a rotating log file.
DYNISO_DISTANCE_FLOOR : float
    Minimum pairwise distance tolerated by the simulator (default 1e-9).
DYNISO_MAX_RETRIES : int
    Alternative τ_j choices A2 may try per τ before giving up (default 64).

Examples
--------
>>> from src.core.settings import load_settings
>>> settings = load_settings()
>>> settings.threads
1
"""

import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterable, List, Mapping, Optional, TypeVar

from dotenv import load_dotenv
from loguru import logger

from src.core.errors import ConfigError

# Load environment variables
load_dotenv()

T = TypeVar("T")
R = TypeVar("R")

_TRUE_WORDS = {"1", "true", "yes", "on"}
_FALSE_WORDS = {"0", "false", "no", "off", ""}


@dataclass(frozen=True)
class Settings:
    """
    Resolved runtime configuration.

    Attributes
    ----------
    threads : int
        Maximum number of worker threads for candidate fan-out.
    debug : bool
        Whether debug assertions run.
    log_level : str
        Level for the stderr sink.
    log_file : str or None
        Path of the rotating log file, if any.
    distance_floor : float
        Simulator collision floor.
    max_retries : int
        A2 backtracking budget per τ.
    """

    threads: int = 1
    debug: bool = False
    log_level: str = "WARNING"
    log_file: Optional[str] = None
    distance_floor: float = 1e-9
    max_retries: int = 64


def _read_int(env: Mapping[str, str], name: str, default: int, minimum: int) -> int:
    raw = env.get(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        value = int(raw)
    except ValueError as e:
        logger.error(f"{name} is not an integer: {raw!r}")
        raise ConfigError(f"{name} must be an integer, got {raw!r}") from e
    if value < minimum:
        logger.error(f"{name}={value} is below the minimum {minimum}")
        raise ConfigError(f"{name} must be >= {minimum}, got {value}")
    return value


def _read_bool(env: Mapping[str, str], name: str, default: bool) -> bool:
    raw = env.get(name)
    if raw is None:
        return default
    word = raw.strip().lower()
    if word in _TRUE_WORDS:
        return True
    if word in _FALSE_WORDS:
        return False
    logger.error(f"{name} is not a boolean: {raw!r}")
    raise ConfigError(f"{name} must be a boolean word, got {raw!r}")


def _read_level(env: Mapping[str, str], name: str, default: str) -> str:
    level = (env.get(name) or default).strip().upper()
    try:
        logger.level(level)
    except ValueError as e:
        logger.error(f"{name} is not a log level: {level!r}")
        raise ConfigError(f"{name} must name a log level, got {level!r}") from e
    return level


def load_settings(env: Optional[Mapping[str, str]] = None) -> Settings:
    """
    Build a `Settings` value from the environment.

    Parameters
    ----------
    env : mapping, optional
        Variables to read instead of `os.environ` (used by tests).

    Returns
    -------
    Settings
        The resolved configuration.

    Raises
    ------
    ConfigError
        If any variable is present but malformed.
    """
    env = os.environ if env is None else env
    floor_raw = env.get("DYNISO_DISTANCE_FLOOR")
    floor = 1e-9
    if floor_raw is not None and floor_raw.strip() != "":
        try:
            floor = float(floor_raw)
        except ValueError as e:
            raise ConfigError(
                f"DYNISO_DISTANCE_FLOOR must be a number, got {floor_raw!r}"
            ) from e
        if not floor > 0:
            raise ConfigError(f"DYNISO_DISTANCE_FLOOR must be positive, got {floor}")

    settings = Settings(
        threads=_read_int(env, "DYNISO_THREADS", 1, 1),
        debug=_read_bool(env, "DYNISO_DEBUG", False),
        log_level=_read_level(env, "DYNISO_LOG_LEVEL", "WARNING"),
        log_file=env.get("DYNISO_LOG_FILE") or None,
        distance_floor=floor,
        max_retries=_read_int(env, "DYNISO_MAX_RETRIES", 64, 0),
    )
    logger.debug(f"Loaded settings: {settings}")
    return settings


def configure_logging(settings: Settings) -> None:
    """
    Replace loguru's default sink with the configured ones.
    """
    logger.remove()
    logger.add(sys.stderr, level=settings.log_level)
    if settings.log_file:
        logger.add(settings.log_file, rotation="10 MB", level="DEBUG")
    logger.info(f"Logging configured at level {settings.log_level}.")


def ordered_map(fn: Callable[[T], R], items: Iterable[T], workers: int) -> List[R]:
    """
    Apply `fn` to every item, optionally on a thread pool, keeping input order.
    """
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]

    with ThreadPoolExecutor(max_workers=min(workers, len(items))) as pool:
        return list(pool.map(fn, items))
