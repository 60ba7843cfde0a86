"""Configuration module."""

from ptcavity.core.config.loader import load_config
from ptcavity.core.config.schema import PRESET_NOTES, PRESETS, RunConfig

__all__ = ["PRESETS", "PRESET_NOTES", "RunConfig", "load_config"]
