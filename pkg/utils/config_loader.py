import json
import os
from typing import Any, Dict, Optional

DEFAULT_CONFIG_FILE: str = "utils/config.json"
CONFIG_ENV_VAR: str = "CURRICULUM_CONFIG"


def resolve_config_path(config_file: Optional[str] = None) -> str:
    """Explicit path first, then ``CURRICULUM_CONFIG``, then the shipped default."""
    return config_file or os.getenv(CONFIG_ENV_VAR) or DEFAULT_CONFIG_FILE


def _merge(base: Dict[str, Any], override: Dict[str, Any]) -> Dict[str, Any]:
    merged = dict(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _merge(merged[key], value)
        else:
            merged[key] = value
    return merged


def load_config(config_file: Optional[str] = None) -> dict:
    """
    Loads the configuration from a JSON file.

    A file may name another config under ``"extends"`` (relative to its own
    directory); its fields are then merged over that base, nested sections
    key by key.

    Args:
        config_file (Optional[str]): The path to the configuration file.

    Returns:
        dict: The configuration as a dictionary.

    Raises:
        FileNotFoundError: If the configuration file (or a base it extends) does not exist.
        json.JSONDecodeError: If the configuration file contains invalid JSON.
    """
    path = resolve_config_path(config_file)
    if not os.path.exists(path):
        raise FileNotFoundError(f"Configuration file not found: {path}")

    with open(path, "r", encoding="utf-8") as file:
        config = json.load(file)

    base_name = config.pop("extends", None)
    if base_name:
        base_path = os.path.join(os.path.dirname(path), base_name)
        config = _merge(load_config(base_path), config)
    return config
