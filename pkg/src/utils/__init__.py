"""Logging setup, report emission and presets."""
from src.utils.emit import emit
from src.utils.log_config import configure_logging
from src.utils.presets import list_presets, load_config, load_preset

__all__ = ["configure_logging", "emit", "list_presets", "load_config", "load_preset"]
