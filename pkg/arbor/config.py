"""
Experiment configuration: a flat ``key = value`` file plus command-line overrides.
"""

import logging
import os
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

from .estimators import ESTIMATORS, REVERSE_DMC
from .exceptions import ConfigError
from .models import MODELS, PA, URRT

logger = logging.getLogger(__name__)

THREADS_ENV = "ARBOR_THREADS"

DEFAULT_SIZES = [500, 1000, 2000, 4000, 8000]
DEFAULT_RATE_SIZES = [1000, 2000, 4000, 8000]
DEFAULT_REPLICATES = 10

_LIST_KEYS = {"sizes", "alphas", "estimators"}
_BOOL_KEYS = {"bounds", "svg"}
_KEYS = _LIST_KEYS | _BOOL_KEYS | {"model", "replicates", "seed", "output_dir", "threads"}
_TRUE = {"1", "true", "yes", "on"}
_FALSE = {"0", "false", "no", "off"}


def _parse_bool(key: str, raw: str) -> bool:
    value = raw.strip().lower()
    if value in _TRUE:
        return True
    if value in _FALSE:
        return False
    raise ConfigError(f"'{key}' expects a boolean, got '{raw}'")


def _parse_list(key: str, raw: Union[str, List[Any]]) -> List[str]:
    items = raw if isinstance(raw, list) else str(raw).split(",")
    return [str(item).strip() for item in items if str(item).strip()]


def _parse_int(key: str, raw: Any) -> int:
    try:
        return int(raw)
    except (TypeError, ValueError):
        raise ConfigError(f"'{key}' expects an integer, got '{raw}'")


def _parse_float(key: str, raw: Any) -> float:
    try:
        return float(raw)
    except (TypeError, ValueError):
        raise ConfigError(f"'{key}' expects a number, got '{raw}'")


def parse_int_list(key: str, raw: Union[str, List[Any]]) -> List[int]:
    """
    Parse a comma-separated list of integers.

    Raises:
        ConfigError: If an item is not an integer
    """
    return [_parse_int(key, item) for item in _parse_list(key, raw)]


def parse_float_list(key: str, raw: Union[str, List[Any]]) -> List[float]:
    """
    Parse a comma-separated list of numbers.

    Raises:
        ConfigError: If an item is not a number
    """
    return [_parse_float(key, item) for item in _parse_list(key, raw)]


class ExperimentConfig:
    """
    Settings for a simulation run.

    Example:
        >>> config = ExperimentConfig(model="pa", sizes=[1000, 2000], alphas=[1.0, 1.2])
        >>> config.validate()
    """

    def __init__(
        self,
        model: str = URRT,
        sizes: Optional[List[int]] = None,
        alphas: Optional[List[float]] = None,
        estimators: Optional[List[str]] = None,
        replicates: int = DEFAULT_REPLICATES,
        seed: int = 0,
        output_dir: Union[str, Path] = "results",
        bounds: bool = False,
        svg: bool = False,
        threads: Optional[int] = None,
    ):
        """
        Args:
            model: ``urrt`` or ``pa``
            sizes: Tree sizes (default 500 to 8000, doubling)
            alphas: Weight exponents (default [1.0])
            estimators: Estimator names (default ["descendant"])
            replicates: Trees per size
            seed: Master seed
            output_dir: Directory receiving CSV, JSON and SVG output
            bounds: Also write reference bound curves
            svg: Also render SVG plots
            threads: Worker processes; falls back to ARBOR_THREADS, then 1
        """
        self.model = model
        self.sizes = list(sizes) if sizes is not None else list(DEFAULT_SIZES)
        self.alphas = list(alphas) if alphas is not None else [1.0]
        self.estimators = list(estimators) if estimators is not None else ["descendant"]
        self.replicates = replicates
        self.seed = seed
        self.output_dir = Path(output_dir)
        self.bounds = bounds
        self.svg = svg
        self.threads = threads if threads is not None else self._threads_from_env()

    @staticmethod
    def _threads_from_env() -> int:
        raw = os.environ.get(THREADS_ENV)
        if not raw:
            return 1
        return _parse_int(THREADS_ENV, raw)

    @classmethod
    def load(cls, path: Union[str, Path]) -> "ExperimentConfig":
        """
        Read a configuration file.

        One ``key = value`` per line, ``#`` starts a comment, lists are
        comma-separated. Unknown keys are rejected.

        Raises:
            ConfigError: If the file is missing or malformed
        """
        path = Path(path)
        if not path.is_file():
            raise ConfigError(f"Config file not found: {path}")
        values: Dict[str, str] = {}
        for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
            key, value = (part.strip() for part in line.split("=", 1))
            if key not in _KEYS:
                raise ConfigError(f"{path}:{lineno}: unknown key '{key}'")
            values[key] = value
        config = cls()
        config.apply(values)
        return config

    def apply(self, overrides: Dict[str, Any]) -> "ExperimentConfig":
        """
        Overwrite settings from a mapping; ``None`` values are skipped.

        Raises:
            ConfigError: On unknown keys or unparsable values
        """
        for key, raw in overrides.items():
            if raw is None:
                continue
            if key not in _KEYS:
                raise ConfigError(f"Unknown config key '{key}'")
            if key == "sizes":
                self.sizes = parse_int_list(key, raw)
            elif key == "alphas":
                self.alphas = parse_float_list(key, raw)
            elif key == "estimators":
                self.estimators = _parse_list(key, raw)
            elif key in _BOOL_KEYS:
                setattr(self, key, raw if isinstance(raw, bool) else _parse_bool(key, raw))
            elif key in ("replicates", "seed", "threads"):
                setattr(self, key, _parse_int(key, raw))
            elif key == "output_dir":
                self.output_dir = Path(raw)
            else:
                self.model = str(raw).strip().lower()
        return self

    def validate(self) -> "ExperimentConfig":
        """
        Check the configuration.

        Raises:
            ConfigError: On an unknown model or estimator, an empty list,
                a size below 2, a negative alpha, or non-positive counts
        """
        if self.model not in MODELS:
            raise ConfigError(f"Unknown model '{self.model}'; choose from {', '.join(MODELS)}")
        for key in _LIST_KEYS:
            if not getattr(self, key):
                raise ConfigError(f"'{key}' must not be empty")
        if any(n < 2 for n in self.sizes):
            raise ConfigError(f"Sizes must be at least 2, got {self.sizes}")
        if any(a < 0 for a in self.alphas):
            raise ConfigError(f"Alphas must be non-negative, got {self.alphas}")
        unknown = [e for e in self.estimators if e not in ESTIMATORS]
        if unknown:
            raise ConfigError(f"Unknown estimator(s) {unknown}; choose from {', '.join(ESTIMATORS)}")
        if len(set(self.estimators)) != len(self.estimators):
            raise ConfigError(f"Duplicate estimators in {self.estimators}")
        if self.replicates < 1:
            raise ConfigError("replicates must be at least 1")
        if self.threads < 1:
            raise ConfigError("threads must be at least 1")
        if self.model != PA and REVERSE_DMC in self.estimators:
            logger.warning(
                "reverse_dmc scores leaves by the preferential attachment likelihood; running it on %s trees",
                self.model,
            )
        return self

    def to_dict(self) -> Dict[str, Any]:
        """Config echo for the run manifest; ``threads`` is left out since it never changes results."""
        return {
            "model": self.model,
            "sizes": list(self.sizes),
            "alphas": list(self.alphas),
            "estimators": list(self.estimators),
            "replicates": self.replicates,
            "seed": self.seed,
            "output_dir": str(self.output_dir),
            "bounds": self.bounds,
            "svg": self.svg,
        }

    def __repr__(self):
        return (
            f"<ExperimentConfig: {self.model} sizes={self.sizes} alphas={self.alphas} "
            f"estimators={self.estimators} replicates={self.replicates}>"
        )
