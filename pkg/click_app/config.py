import os
from pathlib import Path
from typing import Any, Dict, Optional

import yaml
from dotenv import load_dotenv
from pydantic import ValidationError

from domain.errors import ConfigError
from domain.models import ExperimentConfig, ExperimentKind

# Load environment variables
load_dotenv()


class Config:
    """Base configuration."""
    OUTPUT_DIR = os.getenv("LAB_OUTPUT_DIR", "results")
    N_JOBS = int(os.getenv("LAB_N_JOBS", "1"))
    LOG_LEVEL = os.getenv("LAB_LOG_LEVEL", "INFO").upper()
    RECORD_TIMING = os.getenv("LAB_RECORD_TIMING", "False").lower() == "true"


class DevelopmentConfig(Config):
    """Development configuration."""
    LOG_LEVEL = os.getenv("LAB_LOG_LEVEL", "DEBUG").upper()


class ProductionConfig(Config):
    """Production configuration."""
    LOG_LEVEL = os.getenv("LAB_LOG_LEVEL", "INFO").upper()


# Configuration dictionary
config = {
    'development': DevelopmentConfig,
    'production': ProductionConfig,
    'default': ProductionConfig
}


def get_config():
    return config.get(os.getenv("LAB_ENV", "default"), config['default'])


# data sizes given on the command line become the grid of the sweep that varies them
_GRIDS = {
    ExperimentKind.RECOVER_SWEEP_D: ("d", "d_grid"),
    ExperimentKind.RECOVER_SWEEP_N: ("n", "n_grid"),
    ExperimentKind.SUPCON_SWEEP_M: ("m", "m_grid"),
}


def load_experiment_file(path: str) -> Dict[str, Any]:
    """Read a flat YAML mapping of ExperimentConfig keys."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError(f"cannot read config file {path}: {e}") from e
    try:
        document = yaml.safe_load(text)
    except yaml.YAMLError as e:
        raise ConfigError(f"config file {path} is not valid YAML: {e}") from e
    if document is None:
        return {}
    if not isinstance(document, dict):
        raise ConfigError(f"config file {path} must hold a mapping, got {type(document).__name__}")
    return document


def build_experiment_config(
    path: Optional[str] = None,
    experiment: Optional[str] = None,
    overrides: Optional[Dict[str, Any]] = None,
) -> ExperimentConfig:
    """File values, then command-line overrides, on top of the experiment preset."""
    values = load_experiment_file(path) if path else {}
    values.update({k: v for k, v in (overrides or {}).items() if v is not None})
    if experiment:
        values["experiment"] = experiment
    kind = values.pop("experiment", None)
    if kind is None:
        raise ConfigError("no experiment given (use --experiment or an 'experiment' key)")
    try:
        kind = ExperimentKind(kind)
    except ValueError as e:
        raise ConfigError(f"unknown experiment {kind!r}") from e

    for kind_with_grid, (size, grid) in _GRIDS.items():
        value = values.get(size)
        if isinstance(value, list):
            if kind == kind_with_grid:
                values[grid] = values.pop(size)
            elif len(value) == 1:
                values[size] = value[0]
            else:
                raise ConfigError(f"{size} takes a single value for {kind.value}")
    values.setdefault("output_path", get_config().OUTPUT_DIR)
    try:
        return ExperimentConfig.for_experiment(kind, **values)
    except ValidationError as e:
        raise ConfigError(f"invalid configuration: {e}") from e
