"""
The weighted ordering risk, reference bound curves and growth-rate fits.
"""

import logging
import math
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy.stats import linregress

from .exceptions import LabelError, RiskError
from .models import (
    MODELS,
    PA,
    RISK_SAMPLE_COLUMNS,
    URRT,
    GroundTruth,
    Ordering,
    RateFit,
    RiskSample,
    RiskSummary,
)

logger = logging.getLogger(__name__)

LOWER_BOUND_CONSTANT = 70.0
LOWER_BOUND_FLOOR = 0.5
LOWER_BOUND_MIN_SIZE = {URRT: 200, PA: 300}
DESCENDANT_BOUND_MIN_SIZE = 60

AUTHORITATIVE = "authoritative"
UNSPECIFIED = "unspecified in paper"
TRIVIAL_REGIME = "trivial regime"


def risk_alpha(estimate: Ordering, truth: GroundTruth, alpha: float) -> float:
    """
    Realized weighted ordering risk.

    Sum over labels i of |estimate(i) - sigma(i)| / sigma(i)**alpha. The
    expectation is taken upstream by averaging replicates.

    Args:
        estimate: Estimated ranks
        truth: True ranks
        alpha: Weight exponent (>= 0)

    Returns:
        Non-negative risk, zero exactly when the ranks agree

    Raises:
        LabelError: If the orderings cover different label sets
        RiskError: If alpha < 0
    """
    if estimate.n != truth.n:
        raise LabelError(f"Estimate has {estimate.n} labels, ground truth has {truth.n}")
    if alpha < 0:
        raise RiskError(f"alpha must be non-negative, got {alpha}")
    sigma = truth.sigma.astype(float)
    return float(np.sum(np.abs(estimate.rank - truth.sigma) / sigma ** alpha))


def regime(alpha: float) -> Optional[str]:
    """Flag alpha < 1, where even a random permutation is rate-optimal."""
    return TRIVIAL_REGIME if alpha < 1 else None


def lower_bound(n: int, alpha: float, model: str) -> float:
    """
    Minimax lower bound for label-invariant estimators.

    max(n^(2 - alpha) / 70, 1/2) when n is in the bound's valid range
    (n >= 200 for URRT, n >= 300 for PA) and alpha > 0; otherwise only the
    1/2 floor, which holds for every n >= 2.

    Raises:
        RiskError: If the model is unknown or alpha < 0
    """
    if model not in MODELS:
        raise RiskError(f"Unknown model '{model}'")
    if alpha < 0:
        raise RiskError(f"alpha must be non-negative, got {alpha}")
    if alpha > 0 and n >= LOWER_BOUND_MIN_SIZE[model]:
        return max(n ** (2.0 - alpha) / LOWER_BOUND_CONSTANT, LOWER_BOUND_FLOOR)
    return LOWER_BOUND_FLOOR


def _check_alpha(alpha: float) -> None:
    if alpha < 1:
        raise RiskError(f"Upper bounds are stated for alpha >= 1, got {alpha}")


def _zeta_partial(n: int, alpha: float) -> float:
    return float(np.sum(np.arange(1, n + 1, dtype=float) ** -alpha))


def urrt_leading_constant(alpha: float) -> float:
    """K(alpha) = 2/(2-a) + 2e^2/(2-a)^2 + 2/(2-a)^3 for 1 <= alpha < 2."""
    _check_alpha(alpha)
    if alpha >= 2:
        raise RiskError("The URRT leading constant is defined for alpha < 2")
    g = 2.0 - alpha
    return 2.0 / g + 2.0 * math.e ** 2 / g ** 2 + 2.0 / g ** 3


def pa_leading_constant(alpha: float) -> float:
    """The preferential attachment K(alpha), defined for 1 <= alpha < 3/2."""
    _check_alpha(alpha)
    if alpha >= 1.5:
        raise RiskError("The PA leading constant is defined for alpha < 3/2")
    g = 2.0 - alpha
    h = 1.5 - alpha
    root2 = math.sqrt(2.0)
    return 2.0 / g + (8.0 * root2 + 10.0 / root2) / (h * g) + 20.0 / (root2 * g * h ** 2)


def upper_bound_urrt(n: int, alpha: float, K: float = 1.0, C: float = 1.0) -> float:
    """
    Upper bound on the Jordan ordering's risk in the URRT model.

    K(alpha) n^(2-alpha) + K sum_i i^-alpha + C log^4(n) for 1 <= alpha < 2,
    and C log^4(n) for alpha >= 2. K and C have no known numeric value and
    default to 1.

    Raises:
        RiskError: If alpha < 1
    """
    _check_alpha(alpha)
    polylog = C * math.log(n) ** 4
    if alpha >= 2:
        return polylog
    return urrt_leading_constant(alpha) * n ** (2.0 - alpha) + K * _zeta_partial(n, alpha) + polylog


def upper_bound_pa(n: int, alpha: float, K: float = 1.0, C: float = 1.0, c: float = 1.0) -> float:
    """
    Upper bound on the Jordan ordering's risk in the PA model.

    K(alpha) n^(2-alpha) + K sum_i i^-alpha + C log^2(n) sqrt(n) for
    1 <= alpha < 3/2, and c n^(3/2) beyond. K, C and c default to 1.

    Raises:
        RiskError: If alpha < 1
    """
    _check_alpha(alpha)
    if alpha >= 1.5:
        return c * n ** 1.5
    return (
        pa_leading_constant(alpha) * n ** (2.0 - alpha)
        + K * _zeta_partial(n, alpha)
        + C * math.log(n) ** 2 * math.sqrt(n)
    )


def descendant_bound_urrt(n: int) -> float:
    """
    Bound on the descendant ordering's risk at alpha = 1 in the URRT model.

    18n for n >= 60, otherwise 3 + log(n) + (2 + 2e^2 + log 3) n.
    """
    if n >= DESCENDANT_BOUND_MIN_SIZE:
        return 18.0 * n
    return 3.0 + math.log(n) + (2.0 + 2.0 * math.e ** 2 + math.log(3.0)) * n


def optimality_ratio(alpha: float, model: str) -> float:
    """
    Asymptotic ratio between the Jordan ordering's risk bound and the minimax risk.

    Raises:
        RiskError: Outside 1 <= alpha < 2 (URRT) or 1 <= alpha < 3/2 (PA)
    """
    _check_alpha(alpha)
    if model == URRT:
        if alpha == 1:
            return 1170.0
        if alpha >= 2:
            raise RiskError("No optimality ratio for alpha >= 2 in the URRT model")
        g = 2.0 - alpha
        return LOWER_BOUND_CONSTANT * (1.0 / g + 3.0 / g ** 2 + 1.0 / g ** 3)
    if model == PA:
        return LOWER_BOUND_CONSTANT * pa_leading_constant(alpha)
    raise RiskError(f"Unknown model '{model}'")


def random_ordering_risk(n: int, alpha: float) -> float:
    """
    Exact expected risk of a uniformly random permutation.

    A uniform rank U on 1..n has E|U - i| = (i(i-1) + (n-i)(n-i+1)) / (2n).
    """
    i = np.arange(1, n + 1, dtype=float)
    spread = (i * (i - 1) + (n - i) * (n - i + 1)) / (2.0 * n)
    return float(np.sum(spread / i ** alpha))


def bound_curves(model: str, sizes: Sequence[int], alphas: Sequence[float]) -> pd.DataFrame:
    """
    Lower and upper reference curves for plotting and bounds.csv.

    Each row carries a ``status`` column: ``authoritative`` for constants
    with known numeric values, ``unspecified in paper`` for curves
    using the default K, C, c.
    """
    upper = upper_bound_urrt if model == URRT else upper_bound_pa
    rows = []
    for alpha in alphas:
        for n in sizes:
            rows.append(
                {"model": model, "n": n, "alpha": alpha, "curve": "lower",
                 "value": lower_bound(n, alpha, model), "status": AUTHORITATIVE}
            )
            if alpha >= 1:
                rows.append(
                    {"model": model, "n": n, "alpha": alpha, "curve": "upper",
                     "value": upper(n, alpha), "status": UNSPECIFIED}
                )
            else:
                rows.append(
                    {"model": model, "n": n, "alpha": alpha, "curve": "random",
                     "value": random_ordering_risk(n, alpha), "status": TRIVIAL_REGIME}
                )
            if model == URRT and alpha == 1:
                rows.append(
                    {"model": model, "n": n, "alpha": alpha, "curve": "descendant_upper",
                     "value": descendant_bound_urrt(n), "status": AUTHORITATIVE}
                )
    return pd.DataFrame(rows, columns=["model", "n", "alpha", "curve", "value", "status"])


def rate_regression(points: Iterable[Tuple[int, float]]) -> RateFit:
    """
    Least-squares fit of log(risk) on log(n).

    Args:
        points: ``(n, risk)`` pairs

    Returns:
        RateFit whose slope estimates the growth exponent

    Raises:
        RiskError: If a risk is not positive or fewer than two sizes are distinct
    """
    pairs = [(int(n), float(r)) for n, r in points]
    sizes = sorted({n for n, _ in pairs})
    if len(sizes) < 2:
        raise RiskError("Rate regression needs at least two distinct sizes")
    if any(r <= 0 for _, r in pairs) or any(n <= 0 for n, _ in pairs):
        raise RiskError("Rate regression needs positive sizes and risks")
    x = np.log([n for n, _ in pairs])
    y = np.log([r for _, r in pairs])
    fit = linregress(x, y)
    return RateFit(fit.slope, fit.intercept, fit.rvalue ** 2, sizes)


def samples_frame(samples: Iterable[RiskSample]) -> pd.DataFrame:
    """Samples as a canonically sorted frame with the samples.csv columns."""
    frame = pd.DataFrame([s.to_dict() for s in samples], columns=RISK_SAMPLE_COLUMNS)
    return frame.sort_values(["model", "n", "alpha", "estimator", "replicate"], kind="mergesort")


def summarize(samples: Iterable[RiskSample]) -> List[RiskSummary]:
    """
    Boxplot statistics (mean, median, quartiles) per cell.

    Samples are sorted by replicate before aggregating, so the result does
    not depend on the order in which replicates finished.
    """
    frame = samples_frame(samples)
    if frame.empty:
        return []
    grouped = frame.groupby(["model", "n", "alpha", "estimator"], sort=True)["risk"]
    stats = grouped.agg(
        count="count",
        mean="mean",
        median="median",
        q1=lambda s: s.quantile(0.25),
        q3=lambda s: s.quantile(0.75),
    ).reset_index()
    return [RiskSummary(row) for row in stats.to_dict("records")]


def fit_rates(summaries: Iterable[RiskSummary], statistic: str = "median") -> List[RateFit]:
    """
    Fit a growth exponent per (model, alpha, estimator) across sizes.

    Args:
        summaries: Cell summaries spanning at least two sizes
        statistic: ``median`` (default) or ``mean``

    Raises:
        RiskError: If the statistic is unknown or a group is degenerate
    """
    if statistic not in ("median", "mean"):
        raise RiskError(f"Unknown statistic '{statistic}'")
    groups: Dict[Tuple[str, float, str], List[Tuple[int, float]]] = {}
    for s in summaries:
        groups.setdefault((s.model, s.alpha, s.estimator), []).append((s.n, getattr(s, statistic)))
    fits = []
    for (model, alpha, estimator), points in sorted(groups.items()):
        fit = rate_regression(points)
        fit.model, fit.alpha, fit.estimator = model, alpha, estimator
        logger.info("%s %s alpha=%g: slope %.3f (r2 %.3f)", model, estimator, alpha, fit.slope, fit.r_squared)
        fits.append(fit)
    return fits
