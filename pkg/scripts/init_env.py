#!/usr/bin/env python3
"""
init_env.py

Write the dyniso settings to a `.env` file.

- Every `DYNISO_*` variable gets its default, or a value given on the
  command line.
- Existing values are left alone unless `--force` is provided.
- A new `.env` is created with permissions 600.

Usage
-----
Show the resulting settings without writing them:
    $ python3 -m scripts.init_env

Write/update `.env`:
    $ python3 -m scripts.init_env --write --threads 4

Overwrite existing values:
    $ python3 -m scripts.init_env --write --force --log-level DEBUG
"""

import argparse
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Mapping, Optional, Tuple

from dotenv import dotenv_values, set_key
from loguru import logger

ENV_FILE = Path(".env")


@dataclass(frozen=True)
class EnvSetting:
    key: str
    flag: str
    default: str


SETTINGS: Tuple[EnvSetting, ...] = (
    EnvSetting("DYNISO_THREADS", "--threads", "1"),
    EnvSetting("DYNISO_DEBUG", "--debug", "false"),
    EnvSetting("DYNISO_LOG_LEVEL", "--log-level", "WARNING"),
    EnvSetting("DYNISO_LOG_FILE", "--log-file", ""),
    EnvSetting("DYNISO_DISTANCE_FLOOR", "--distance-floor", "1e-9"),
    EnvSetting("DYNISO_MAX_RETRIES", "--max-retries", "64"),
)


def plan_updates(
    existing: Mapping[str, Optional[str]],
    overrides: Mapping[str, Optional[str]],
    force: bool,
) -> Dict[str, str]:
    """
    Decide which keys to write.

    Parameters
    ----------
    existing : mapping
        Variables already in the `.env` file.
    overrides : mapping
        Command-line values by key; None means "use the default".
    force : bool
        Overwrite keys that are already present.

    Returns
    -------
    dict
        Key to value, in table order.
    """
    updates: Dict[str, str] = {}
    for setting in SETTINGS:
        if setting.key in existing and not force:
            logger.warning(f"{setting.key} already present. Use --force to overwrite.")
            continue
        value = overrides.get(setting.key)
        updates[setting.key] = setting.default if value is None else value
    return updates


def apply_updates(path: Path, updates: Mapping[str, str]) -> None:
    """Write `updates` into `path`, creating it with mode 600 when missing."""
    if not path.exists():
        logger.info(f"{path} does not exist. Creating it with restrictive permissions.")
        os.close(os.open(path, os.O_WRONLY | os.O_CREAT | os.O_EXCL, 0o600))
    for key, value in updates.items():
        set_key(path, key, value, quote_mode="never")
        logger.info(f"Set {key} in {path}")


def render(existing: Mapping[str, Optional[str]], updates: Mapping[str, str]) -> str:
    merged = {**existing, **updates}
    return "".join(f"{key}={value or ''}\n" for key, value in merged.items())


def main() -> None:
    parser = argparse.ArgumentParser(description="Write dyniso settings to .env")
    parser.add_argument("--write", action="store_true", help="Write/update .env")
    parser.add_argument("--force", action="store_true", help="Overwrite existing values")
    parser.add_argument("--path", type=Path, default=ENV_FILE, help="Target file")
    for setting in SETTINGS:
        parser.add_argument(setting.flag, dest=setting.key, help=setting.key)
    args = parser.parse_args()

    existing = dotenv_values(args.path) if args.path.exists() else {}
    updates = plan_updates(existing, vars(args), args.force)
    if not args.write:
        print(render(existing, updates), end="")
        return
    apply_updates(args.path, updates)


if __name__ == "__main__":
    main()
