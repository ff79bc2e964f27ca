"""Bundled experiment presets and config-file loading."""
import json
from pathlib import Path
from typing import Any, Optional

from pydantic import ValidationError

from src.exceptions import ConfigError
from src.models.reports import ExperimentConfig

PRESET_DIR = Path(__file__).resolve().parent.parent / "presets"


def list_presets() -> list[str]:
    return sorted(path.stem for path in PRESET_DIR.glob("*.json"))


def _validate(data: dict[str, Any], source: str) -> ExperimentConfig:
    try:
        return ExperimentConfig.model_validate(data)
    except ValidationError as e:
        raise ConfigError(f"invalid config in {source}: {e}") from e


def load_config(path: Path, overrides: Optional[dict[str, Any]] = None) -> ExperimentConfig:
    """
    Read a JSON config file; ``overrides`` (from CLI flags) win over file values.

    Raises:
        ConfigError: If the file is missing, is not JSON, or fails validation
    """
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except FileNotFoundError as e:
        raise ConfigError(f"config file not found: {path}") from e
    except json.JSONDecodeError as e:
        raise ConfigError(f"config file {path} is not JSON (line {e.lineno}, column {e.colno})") from e
    data.update({k: v for k, v in (overrides or {}).items() if v is not None})
    return _validate(data, str(path))


def load_preset(name: str, overrides: Optional[dict[str, Any]] = None) -> ExperimentConfig:
    """
    Raises:
        ConfigError: If no bundled preset has this name
    """
    path = PRESET_DIR / f"{name}.json"
    if not path.exists():
        raise ConfigError(f"unknown preset {name!r}; available: {', '.join(list_presets())}")
    return load_config(path, overrides)
