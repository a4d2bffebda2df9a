# Numerical tolerances and run configuration for the verifier

import logging
import os
from typing import Any, Dict, Literal, Optional

import yaml
from dotenv import load_dotenv
from pydantic import BaseModel, Field, ValidationError, field_validator

from utils.errors import ConfigError

logger = logging.getLogger(__name__)

# Load environment variables
load_dotenv()

# Matrix tolerances
HERM_TOL = 1e-10
PSD_TOL = 1e-9
EQ_TOL = 1e-9
TRACE_TOL = 1e-9

# Thresholded verdicts: expectation >= r - THRESHOLD_SLACK
THRESHOLD_SLACK = 1e-9

# Infinite sums (loops, recursion); raw env values are re-validated by RunConfig
_ENV_TOL = os.getenv('QWP_TOL')
_ENV_MAX_ITER = os.getenv('QWP_MAX_ITER')


def _env_number(name: str, raw: Optional[str], default, cast):
    if raw is None:
        return default
    try:
        value = cast(raw)
    except ValueError:
        value = None
    if value is None or not value > 0:
        logger.warning("ignoring %s=%r: expected a positive %s, using %s", name, raw, cast.__name__, default)
        return default
    return value


TRUNCATION_TOL = _env_number("QWP_TOL", _ENV_TOL, 1e-10, float)
MAX_ITER = _env_number("QWP_MAX_ITER", _ENV_MAX_ITER, 100000, int)

# Duality sampling
DUALITY_TRIALS = 100
DEFAULT_SEED = 0

# Logging
LOG_LEVEL = os.getenv('QWP_LOG_LEVEL', 'WARNING')


class RunConfig(BaseModel):
    """Tolerance overrides and output options for one CLI run."""
    psd_tol: float = PSD_TOL
    truncation_tol: float = Field(default=_ENV_TOL or TRUNCATION_TOL)
    max_iter: int = Field(default=_ENV_MAX_ITER or MAX_ITER)
    seed: int = Field(default=DEFAULT_SEED, ge=0)
    duality_trials: int = DUALITY_TRIALS
    output_format: Literal["json", "text"] = "json"
    observable: bool = False

    model_config = {"validate_default": True}

    @field_validator("psd_tol", "truncation_tol")
    @classmethod
    def _positive(cls, value: float) -> float:
        if not value > 0:
            raise ValueError("tolerances must be positive")
        return value

    @field_validator("max_iter", "duality_trials")
    @classmethod
    def _at_least_one(cls, value: int) -> int:
        if value < 1:
            raise ValueError("must be at least 1")
        return value


def load_run_config(path: Optional[str] = None, **overrides: Any) -> RunConfig:
    """
    Build a RunConfig from defaults, an optional YAML file and explicit overrides.

    Args:
        path: Optional YAML file with RunConfig fields
        **overrides: Field values that win over the file; None values are skipped

    Returns:
        Validated RunConfig
    """
    values: Dict[str, Any] = {}
    if path:
        try:
            with open(path, 'r', encoding='utf-8') as f:
                loaded = yaml.safe_load(f) or {}
        except (OSError, yaml.YAMLError) as e:
            raise ConfigError(f"cannot read run config {path}: {e}") from e
        if not isinstance(loaded, dict):
            raise ConfigError(f"run config {path} must be a mapping")
        values.update(loaded)

    values.update({k: v for k, v in overrides.items() if v is not None})

    try:
        return RunConfig(**values)
    except ValidationError as e:
        raise ConfigError(f"invalid run configuration: {e}") from e
