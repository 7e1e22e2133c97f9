"""Configuration loading for the CLI.

One TOML or JSON file configures a run; command-line flags win over
file values. On Python 3.11+ TOML parses via tomllib; older runtimes
fall back to a small reader covering the flat key = value subset these
config files actually use (strings, numbers, booleans, [sections]).
"""

from __future__ import annotations

import json
import os
from pathlib import Path
from typing import Any

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    tomllib = None

ENV_CONFIG = "BCI_UI_CONFIG"


class ConfigError(Exception):
    """Unreadable or malformed configuration."""


def _parse_toml_value(raw: str, where: str) -> Any:
    raw = raw.strip()
    if raw.startswith('"') and raw.endswith('"') and len(raw) >= 2:
        return raw[1:-1]
    if raw == "true":
        return True
    if raw == "false":
        return False
    try:
        return int(raw)
    except ValueError:
        pass
    try:
        return float(raw)
    except ValueError:
        pass
    raise ConfigError(f"{where}: unsupported TOML value {raw!r} "
                      "(fallback reader handles strings, numbers, booleans)")


def _parse_toml_subset(text: str, where: str) -> dict[str, Any]:
    doc: dict[str, Any] = {}
    table = doc
    for lineno, line in enumerate(text.splitlines(), 1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if stripped.startswith("[") and stripped.endswith("]"):
            name = stripped[1:-1].strip()
            if not name:
                raise ConfigError(f"{where}:{lineno}: empty table name")
            table = doc.setdefault(name, {})
            continue
        if "=" not in stripped:
            raise ConfigError(f"{where}:{lineno}: expected key = value")
        key, _, raw = stripped.partition("=")
        table[key.strip()] = _parse_toml_value(raw, f"{where}:{lineno}")
    return doc


def load_config_file(path: str | Path) -> dict[str, Any]:
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    text = path.read_text(encoding="utf-8")
    if path.suffix == ".toml":
        if tomllib is not None:
            try:
                return tomllib.loads(text)
            except tomllib.TOMLDecodeError as exc:
                raise ConfigError(f"{path}: {exc}") from exc
        return _parse_toml_subset(text, str(path))
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError(f"{path}: config root must be an object")
    return doc


def resolve_config(path_flag: str | None) -> dict[str, Any]:
    """Load the config file named by flag or BCI_UI_CONFIG, if any."""
    path = path_flag or os.environ.get(ENV_CONFIG)
    if not path:
        return {}
    return load_config_file(path)


def merged(config: dict[str, Any], section: str, **flags: Any) -> dict[str, Any]:
    """Section values overridden by any flag that was actually provided."""
    values = dict(config.get(section, {}))
    for key, value in flags.items():
        if value is not None:
            values[key] = value
    return values
