"""
File Helper Utilities
Loading and atomic saving of the JSON, YAML, TOML and text artifacts
"""
import json
import logging
import os
import sys
import tempfile
from pathlib import Path
from typing import Any, Dict

import tomli_w
import yaml

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

logger = logging.getLogger(__name__)


def load_yaml(filepath: Path) -> Dict[str, Any]:
    """
    Load YAML configuration file

    Args:
        filepath: Path to YAML file

    Returns:
        Dictionary with configuration
    """
    with open(filepath, 'r', encoding='utf-8') as f:
        return yaml.safe_load(f) or {}


def load_toml(filepath: Path) -> Dict[str, Any]:
    """
    Load TOML configuration file

    Args:
        filepath: Path to TOML file

    Returns:
        Dictionary with configuration
    """
    with open(filepath, 'rb') as f:
        return tomllib.load(f)


def load_config_file(filepath: Path) -> Dict[str, Any]:
    """Load a config file, picking the parser from the suffix (.toml, .yaml, .yml, .json)"""
    filepath = Path(filepath)
    suffix = filepath.suffix.lower()
    if suffix == '.toml':
        return load_toml(filepath)
    if suffix in ('.yaml', '.yml'):
        return load_yaml(filepath)
    if suffix == '.json':
        return load_json(filepath)
    raise ValueError(f"Unsupported config format: {filepath.name}")


def load_json(filepath: Path) -> Any:
    """
    Load JSON file

    Args:
        filepath: Path to JSON file

    Returns:
        Loaded data
    """
    with open(filepath, 'r', encoding='utf-8') as f:
        return json.load(f)


def dumps_json(data: Any, indent: int = 2) -> str:
    """Serialize to the canonical JSON text used by every artifact"""
    return json.dumps(data, indent=indent, ensure_ascii=False) + '\n'


def save_text(content: str, filepath: Path, atomic: bool = True) -> Path:
    """
    Save text content to file

    Args:
        content: Text content
        filepath: Path to save to
        atomic: Write to a temporary sibling and rename it into place

    Returns:
        Path to saved file
    """
    filepath = Path(filepath)
    ensure_dir(filepath.parent)

    if not atomic:
        filepath.write_text(content, encoding='utf-8')
        return filepath

    fd, tmp_name = tempfile.mkstemp(dir=filepath.parent, prefix=f'.{filepath.name}.', suffix='.tmp')
    try:
        with os.fdopen(fd, 'w', encoding='utf-8', newline='\n') as f:
            f.write(content)
        os.replace(tmp_name, filepath)
    except BaseException:
        if os.path.exists(tmp_name):
            os.unlink(tmp_name)
        raise

    logger.debug(f"Saved to: {filepath}")
    return filepath


def save_json(data: Any, filepath: Path, indent: int = 2, atomic: bool = True) -> Path:
    """
    Save data to JSON file

    Args:
        data: Data to save
        filepath: Path to save to
        indent: JSON indentation
        atomic: Write atomically

    Returns:
        Path to saved file
    """
    return save_text(dumps_json(data, indent=indent), filepath, atomic=atomic)


def save_toml(data: Dict[str, Any], filepath: Path) -> Path:
    """Save a flat mapping as TOML"""
    return save_text(tomli_w.dumps(data), filepath)


def ensure_dir(directory: Path) -> Path:
    """
    Ensure directory exists, create if it doesn't

    Args:
        directory: Directory path

    Returns:
        The directory path
    """
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    return directory
