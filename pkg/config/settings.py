"""Configuration settings for the Delaunay spread harness."""

from dataclasses import dataclass
from pathlib import Path
from typing import Any, Optional, Union

import yaml

from src.errors import ConfigError


DEFAULT_SEED = 0


@dataclass(frozen=True)
class EngineSettings:
    """Engine-wide knobs read from config/defaults.yaml."""

    desk_cap: int = 20000
    validation_gate: int = 20000
    validation_samples: int = 1000
    oracle_max_points: int = 128
    time_budget_s: float = 300.0
    probes: int = 4096
    log_level: str = "INFO"


def get_project_root() -> Path:
    """Get the project root directory."""
    return Path(__file__).parent.parent


def _load_yaml(path: Path) -> dict:
    if not path.exists():
        raise FileNotFoundError(f"Config file not found at {path}")

    with open(path, "r") as f:
        data = yaml.safe_load(f)

    return data or {}


def load_defaults() -> dict:
    """Load engine defaults from YAML.

    Returns:
        dict: Raw contents of config/defaults.yaml
    """
    return _load_yaml(get_project_root() / "config" / "defaults.yaml")


def get_engine_settings() -> EngineSettings:
    """Build EngineSettings from defaults.yaml, ignoring unknown keys."""
    raw = load_defaults().get("engine", {})
    known = EngineSettings.__dataclass_fields__.keys()
    return EngineSettings(**{k: v for k, v in raw.items() if k in known})


def load_acceptance_config() -> dict:
    """Load pre-registered tolerances and pilot constants.

    Returns:
        dict: Mapping of claim name to its tolerance record
    """
    return _load_yaml(get_project_root() / "config" / "acceptance.yaml").get("claims", {})


REQUIRED_EXPERIMENT_FIELDS = ("family", "sizes")


def load_experiment_config(path: Union[str, Path]) -> dict:
    """Load and check a declarative experiment definition.

    The file is JSON; it is parsed with yaml.safe_load so that parse errors
    carry a line number.

    Args:
        path: Path to the experiment JSON file

    Returns:
        dict with family, sizes, seed, params, tolerances, time_budget_s, workers

    Raises:
        FileNotFoundError: If the file doesn't exist
        ConfigError: If the file is malformed or misses required fields
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Experiment config not found at {path}")

    text = path.read_text()
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as e:
        mark = getattr(e, "problem_mark", None)
        line = mark.line + 1 if mark is not None else None
        raise ConfigError(f"cannot parse config: {getattr(e, 'problem', e)}", line=line) from e

    if not isinstance(raw, dict):
        raise ConfigError("top level must be an object", line=1)

    for field in REQUIRED_EXPERIMENT_FIELDS:
        if field not in raw:
            raise ConfigError("missing required field", field=field, line=_line_of(text, field))

    sizes = raw["sizes"]
    if not isinstance(sizes, list) or not all(isinstance(s, int) and s > 0 for s in sizes):
        raise ConfigError("must be a list of positive integers", field="sizes", line=_line_of(text, "sizes"))

    tolerances = raw.get("tolerances", {})
    if not isinstance(tolerances, dict):
        raise ConfigError("must be an object", field="tolerances", line=_line_of(text, "tolerances"))

    settings = get_engine_settings()
    return {
        "family": str(raw["family"]),
        "sizes": sizes,
        # Defaulted seeds are materialised so outputs always carry one
        "seed": int(raw.get("seed", DEFAULT_SEED)),
        "params": dict(raw.get("params", {})),
        "tolerances": dict(tolerances),
        "time_budget_s": float(raw.get("time_budget_s", settings.time_budget_s)),
        "workers": int(raw.get("workers", 1)),
    }


def _line_of(text: str, key: str) -> Optional[int]:
    """Find the 1-based line mentioning a key, for diagnostics."""
    needle = f'"{key}"'
    for number, line in enumerate(text.splitlines(), start=1):
        if needle in line or line.lstrip().startswith(f"{key}:"):
            return number
    return None


def tolerance(claim: str, key: str, default: Any = None) -> Any:
    """Look up one pre-registered constant from acceptance.yaml."""
    return load_acceptance_config().get(claim, {}).get(key, default)
