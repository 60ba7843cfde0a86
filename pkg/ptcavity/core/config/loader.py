"""Configuration loader: preset + JSON/YAML file + overrides + env."""

from __future__ import annotations

import json
import os
from pathlib import Path
from typing import Any

import yaml
from pydantic import ValidationError

from ptcavity.core.config.schema import PRESETS, RunConfig
from ptcavity.errors import ConfigError


def load_config(
    config_path: str | Path | None = None,
    preset: str | None = None,
    overrides: dict[str, Any] | None = None,
) -> RunConfig:
    """
    Load configuration.

    Resolution order for config file:
        1. Explicit ``config_path`` argument
        2. ``PTCAVITY_CONFIG`` env variable
        3. ``./ptcavity.json`` in cwd

    Layering (later wins): preset, config file, ``overrides``. Env vars and .env
    are applied on top by pydantic-settings.

    Raises
    ------
    ConfigError
        Unknown preset, unreadable or malformed file, or failed validation.
    """
    data: dict[str, Any] = {}
    if preset:
        if preset not in PRESETS:
            raise ConfigError(f"unknown preset '{preset}' (available: {', '.join(PRESETS)})")
        data = _merge(data, PRESETS[preset])
    data = _merge(data, _load_file(_resolve_path(config_path)))
    data = _merge(data, overrides or {})
    try:
        return RunConfig(**data)
    except ValidationError as e:
        raise ConfigError(_summarize(e)) from e


def _resolve_path(config_path: str | Path | None = None) -> Path | None:
    """Resolve config file path."""
    if config_path:
        path = Path(config_path)
        if not path.exists():
            raise ConfigError(f"config file not found: {path}")
        return path

    env = os.environ.get("PTCAVITY_CONFIG")
    if env:
        return Path(env)

    default = Path("ptcavity.json")
    return default if default.exists() else None


def _load_file(path: Path | None) -> dict[str, Any]:
    """Load a JSON (or YAML) document, return empty dict if not found."""
    if not path or not path.exists():
        return {}
    try:
        text = path.read_text(encoding="utf-8")
        if path.suffix.lower() in (".yaml", ".yml"):
            data = yaml.safe_load(text) or {}
        else:
            data = json.loads(text) if text.strip() else {}
    except (OSError, json.JSONDecodeError, yaml.YAMLError) as e:
        raise ConfigError(f"cannot read {path}: {e}") from e
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be an object")
    return data


def _merge(base: dict[str, Any], extra: dict[str, Any]) -> dict[str, Any]:
    """Recursive dict merge; values of ``extra`` win, nested dicts are merged."""
    out = dict(base)
    for key, value in extra.items():
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = _merge(out[key], value)
        else:
            out[key] = value
    return out


def _summarize(e: ValidationError) -> str:
    parts = []
    for err in e.errors():
        loc = ".".join(str(x) for x in err["loc"])
        parts.append(f"{loc}: {err['msg']}" if loc else err["msg"])
    return "; ".join(parts)
