"""
Run configuration

Settings come from four layers, later layers winning:
  1. RunConfig defaults
  2. Environment (SMALLFIBERS_*), optionally loaded from a .env file
  3. A config file (.toml or .yaml) whose keys mirror the CLI flags
  4. Explicit command-line flags
"""
import logging
import os
from dataclasses import dataclass, field, fields, asdict
from pathlib import Path
from typing import Any, Dict, List, Optional

from dotenv import load_dotenv

from .file_helpers import load_config_file
from ..errors import ParameterError

logger = logging.getLogger(__name__)

ENV_PREFIX = 'SMALLFIBERS_'


@dataclass
class RunConfig:
    """Every knob a command can read; None means 'not given'"""
    n: Optional[int] = None
    q: Optional[int] = None
    epsilon: Optional[float] = None
    delta: Optional[float] = None
    r: Optional[int] = None
    seed: int = 0
    samples: int = 10_000
    out: Optional[str] = None
    suite: Optional[str] = None
    resolution: int = 64
    workers: int = 1
    log_dir: Optional[str] = None
    log_level: str = 'INFO'
    bundle: Optional[str] = None
    points: List[List[float]] = field(default_factory=list)
    y: Optional[List[float]] = None
    cube: bool = False
    survey: int = 0
    plots: Optional[str] = None

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


_CASTS = {
    'n': int, 'q': int, 'r': int, 'seed': int, 'samples': int, 'resolution': int,
    'workers': int, 'survey': int, 'epsilon': float, 'delta': float,
}


def _cast(key: str, value: Any) -> Any:
    cast = _CASTS.get(key)
    if cast is None or value is None:
        return value
    try:
        return cast(value)
    except (TypeError, ValueError) as e:
        raise ParameterError(f"Config value for '{key}' is not a valid {cast.__name__}: {value!r}") from e


def env_overrides(dotenv_path: Optional[Path] = None) -> Dict[str, Any]:
    """
    Read SMALLFIBERS_* environment variables

    Args:
        dotenv_path: Explicit .env file (default: search from the working directory)

    Returns:
        Mapping of config keys to values
    """
    load_dotenv(dotenv_path=dotenv_path, override=False)
    known = {f.name for f in fields(RunConfig)}
    values = {}
    for name, raw in os.environ.items():
        if not name.startswith(ENV_PREFIX):
            continue
        key = name[len(ENV_PREFIX):].lower()
        if key in known:
            values[key] = _cast(key, raw)
    return values


def load_run_config(config_path: Optional[Path] = None,
                    cli_values: Optional[Dict[str, Any]] = None,
                    dotenv_path: Optional[Path] = None) -> RunConfig:
    """
    Merge defaults, environment, config file and CLI flags

    Args:
        config_path: Optional .toml/.yaml config file
        cli_values: Flags given on the command line (None values are ignored)
        dotenv_path: Optional .env file

    Returns:
        The merged RunConfig
    """
    known = {f.name for f in fields(RunConfig)}
    merged: Dict[str, Any] = {}
    merged.update(env_overrides(dotenv_path))

    if config_path is not None:
        file_values = load_config_file(Path(config_path))
        unknown = sorted(set(file_values) - known)
        if unknown:
            logger.warning(f"Ignoring unknown config keys: {', '.join(unknown)}")
        merged.update({k: _cast(k, v) for k, v in file_values.items() if k in known})

    for key, value in (cli_values or {}).items():
        if key in known and value is not None:
            merged[key] = _cast(key, value)

    return RunConfig(**merged)
