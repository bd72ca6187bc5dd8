"""
Arbor

Recovering vertex arrival orders in random recursive trees: uniform and
preferential attachment generators, centrality-based and spectral
estimators, the weighted ordering risk and an exact oracle.
"""

__version__ = "0.1.0"

from .api import Arbor
from .config import ExperimentConfig
from .models import (
    GroundTruth,
    LabeledTree,
    Ordering,
    RecursiveTree,
    RiskSample,
    RiskSummary,
    RateFit,
    ScoreVector,
)
from .exceptions import (
    ArborError,
    InvalidSizeError,
    InvalidTreeError,
    LabelError,
    ConvergenceError,
    RiskError,
    OracleError,
    ConfigError,
    ExperimentError,
)

__all__ = [
    "Arbor",
    "ExperimentConfig",
    "GroundTruth",
    "LabeledTree",
    "Ordering",
    "RecursiveTree",
    "RiskSample",
    "RiskSummary",
    "RateFit",
    "ScoreVector",
    "ArborError",
    "InvalidSizeError",
    "InvalidTreeError",
    "LabelError",
    "ConvergenceError",
    "RiskError",
    "OracleError",
    "ConfigError",
    "ExperimentError",
]
