"""
Exact ground truth for testing.

Descendant-count laws come from the Pólya urns behind both growth models;
small trees are enumerated history by history in rational arithmetic, and
expected risks are computed with tie blocks averaged analytically.
"""

import logging
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterable, List, Sequence, Tuple

import networkx as nx
import numpy as np
from scipy.special import gammaln, logsumexp

from . import centrality, estimators, risk, treegen
from .exceptions import OracleError
from .models import (
    MODELS,
    PA,
    PMF_ATOL,
    URRT,
    CheckResult,
    OracleReport,
    Pmf,
    RecursiveTree,
    ScoreVector,
    WeightedHistory,
)
from .rng import derive_rng

logger = logging.getLogger(__name__)

ENUMERATION_CAP = 9
RECONCILE_LIMIT = 8
EXACT_ESTIMATORS = (estimators.JORDAN, estimators.DESCENDANT, estimators.DEGREE, estimators.RANDOM)


def _raw_log_pmf(model: str, n: int, j: int) -> np.ndarray:
    """The closed-form log pmf without reconciliation."""
    k = np.arange(n - j + 1, dtype=float)
    if model == URRT:
        return (
            gammaln(n - j + 1) - gammaln(n - j - k + 1)
            + gammaln(n - k - 1) - gammaln(j - 1)
            - gammaln(n) + gammaln(j)
        )
    return (
        gammaln(n - j + 1) - gammaln(k + 1) - gammaln(n - j - k + 1)
        + gammaln(k + 0.5) - gammaln(0.5)
        + gammaln(n - k - 1.5) - gammaln(j - 1.5)
        - gammaln(n - 1) + gammaln(j - 1)
    )


def _normalized(log_probabilities: np.ndarray) -> np.ndarray:
    return np.exp(log_probabilities - logsumexp(log_probabilities))


def _check_rank(n: int, j: int) -> None:
    if not 2 <= j <= n:
        raise OracleError(f"Rank {j} out of range 2..{n}")


def _reconcile(probabilities: np.ndarray, n: int, j: int, model: str) -> np.ndarray:
    """Defer to enumeration for small trees, logging any disagreement."""
    if n > RECONCILE_LIMIT:
        return probabilities
    exact = enumerated_descendant_pmf(n, j, model)
    gap = float(np.max(np.abs(exact - probabilities)))
    if gap > PMF_ATOL:
        logger.warning(
            "%s descendant pmf of vertex %d at n=%d differs from enumeration by %.3e; using enumeration",
            model, j, n, gap,
        )
        return exact
    return probabilities


def urrt_descendant_pmf(n: int, j: int) -> Pmf:
    """
    Law of the number of descendants of vertex j in URRT(n).

    P{de(j) = k} = k! (j-1) j ... (n-k-2) / (j (j+1) ... (n-1)) * C(n-j, k),
    evaluated and normalized in log space; E[de(j) + 1] = n / j.

    Raises:
        OracleError: If j is outside 2..n
    """
    _check_rank(n, j)
    return Pmf(_reconcile(_normalized(_raw_log_pmf(URRT, n, j)), n, j, URRT))


def pa_descendant_pmf(n: int, i: int) -> Pmf:
    """
    Law of the number of descendants of vertex i in PA(n).

    The subtree of i holds one half-edge and the rest of the tree 2i - 3 when
    i arrives; each later vertex adds two half-edges to the side it joins.
    This gives
    P{de(i) = k} = 1*3*...*(2k-1) * (2i-3)(2i-1)...(2n-2k-5) / ((2i-2) 2i ... (2n-4)) * C(n-i, k),
    evaluated and normalized in log space.

    Raises:
        OracleError: If i is outside 2..n
    """
    _check_rank(n, i)
    return Pmf(_reconcile(_normalized(_raw_log_pmf(PA, n, i)), n, i, PA))


def stated_pa_zero_probability(n: int, i: int) -> float:
    """The closed form (i - 1) / (n - 1) quoted for P{de(i) = 0} in the PA model."""
    _check_rank(n, i)
    return (i - 1) / (n - 1)


def enumerate_histories(n: int, model: str) -> List[WeightedHistory]:
    """
    Every growth history of size n with its exact probability.

    URRT histories all have probability prod 1/(t-1); a PA history has
    prod deg_t(parent)/(2(t-2)) with the second vertex forced onto the first.

    Raises:
        OracleError: If n is outside 1..9 or the model is unknown
    """
    if not 1 <= n <= ENUMERATION_CAP:
        raise OracleError(f"Enumeration supports 1 <= n <= {ENUMERATION_CAP}, got {n}")
    if model not in MODELS:
        raise OracleError(f"Unknown model '{model}'")

    histories: List[WeightedHistory] = []
    degrees = [0] * (n + 2)

    def extend(parents: List[int], probability: Fraction) -> None:
        t = len(parents) + 2
        if t > n:
            histories.append(WeightedHistory(RecursiveTree(parents), probability))
            return
        for v in range(1, t):
            if model == URRT:
                weight = Fraction(1, t - 1)
            elif t == 2:
                weight = Fraction(1)
            else:
                weight = Fraction(degrees[v], 2 * (t - 2))
            if weight == 0:
                continue
            degrees[v] += 1
            degrees[t] = 1
            parents.append(v)
            extend(parents, probability * weight)
            parents.pop()
            degrees[t] = 0
            degrees[v] -= 1

    extend([], Fraction(1))
    return histories


@lru_cache(maxsize=None)
def _enumerated_descendants(n: int, model: str) -> Tuple[np.ndarray, ...]:
    tables = np.zeros((n + 1, n), dtype=object)
    tables[:] = Fraction(0)
    for history in enumerate_histories(n, model):
        de = centrality.descendant_counts(history.tree.to_labeled(), 1)
        for j in range(1, n + 1):
            tables[j, de[j - 1]] += history.probability
    return tuple(tables)


def enumerated_descendant_pmf(n: int, j: int, model: str) -> np.ndarray:
    """Descendant-count probabilities of vertex j from full enumeration (support 0..n-j)."""
    _check_rank(n, j)
    row = _enumerated_descendants(n, model)[j]
    return np.array([float(p) for p in row[: n - j + 1]])


def _mean_abs_gap(first: int, last: int, i: int) -> float:
    """Average of |r - i| over r = first..last."""
    size = last - first + 1
    if i <= first:
        total = (first - i + last - i) * size / 2.0
    elif i >= last:
        total = (i - first + i - last) * size / 2.0
    else:
        total = (i - first) * (i - first + 1) / 2.0 + (last - i) * (last - i + 1) / 2.0
    return total / size


def expected_risk_given_scores(scores: ScoreVector, sigma: Sequence[int], alpha: float) -> float:
    """
    Expected risk of ranking by ``scores`` with uniform tie-breaking.

    A member of a tie block covering ranks a..b takes each of them with
    probability 1/(b - a + 1).
    """
    sigma = np.asarray(sigma)
    total = 0.0
    for block in estimators.tie_blocks(scores):
        for label in block.labels.tolist():
            i = int(sigma[label - 1])
            total += _mean_abs_gap(block.first_rank, block.last_rank, i) / i ** alpha
    return total


def _scores_for(estimator: str, history: WeightedHistory) -> ScoreVector:
    tree = history.tree.to_labeled()
    if estimator == estimators.JORDAN:
        return centrality.jordan_centrality(tree)
    if estimator == estimators.DESCENDANT:
        return centrality.descendant_centrality(tree, 1)
    if estimator == estimators.DEGREE:
        return centrality.degree_vector(tree)
    return ScoreVector(np.zeros(tree.n))


def exact_risk(estimator: str, n: int, alpha: float, model: str) -> float:
    """
    Exact expected risk of an estimator over all histories of size n.

    The estimators covered are label invariant, so each history is scored
    in its own arrival coordinates.

    Raises:
        OracleError: If the estimator has no tie-block form (spectral,
            reverse DMC) or n exceeds the enumeration cap
    """
    if estimator not in EXACT_ESTIMATORS:
        raise OracleError(
            f"Exact risk is available for {', '.join(EXACT_ESTIMATORS)}; got '{estimator}'"
        )
    total = 0.0
    for history in enumerate_histories(n, model):
        scores = _scores_for(estimator, history)
        total += float(history.probability) * expected_risk_given_scores(
            scores, np.arange(1, n + 1), alpha
        )
    return total


def monte_carlo_risk(
    model: str,
    n: int,
    alphas: Sequence[float],
    estimator_names: Sequence[str],
    replicates: int,
    seed: int = 0,
) -> Dict[Tuple[str, float], Tuple[float, float]]:
    """
    Monte Carlo mean risk and its standard error for several estimators at once.

    Every replicate grows one tree and scores all estimators on it.

    Returns:
        ``{(estimator, alpha): (mean, standard error)}``
    """
    values = {(name, alpha): np.empty(replicates) for name in estimator_names for alpha in alphas}
    for rep in range(replicates):
        rng = derive_rng(seed, "oracle", model, n, rep)
        labeled, truth = treegen.shuffle_labels(treegen.generate(model, n, rng), rng)
        for name in estimator_names:
            if name in estimators.ORACLE_ASSISTED:
                ordering = estimators.ORACLE_ASSISTED[name](labeled, truth.root, rng)
            else:
                ordering = estimators.LABEL_ONLY[name](labeled, rng)
            for alpha in alphas:
                values[(name, alpha)][rep] = risk.risk_alpha(ordering, truth, alpha)
    result = {}
    for key, draws in values.items():
        stderr = float(draws.std(ddof=1) / np.sqrt(replicates)) if replicates > 1 else float("inf")
        result[key] = (float(draws.mean()), stderr)
    return result


def _shape_exchangeability(n: int) -> float:
    """Largest probability spread among URRT histories sharing an unlabeled shape."""
    by_shape: Dict[str, List[Fraction]] = {}
    for history in enumerate_histories(n, URRT):
        key = nx.weisfeiler_lehman_graph_hash(history.tree.to_labeled().to_networkx())
        by_shape.setdefault(key, []).append(history.probability)
    return float(max(max(ps) - min(ps) for ps in by_shape.values()))


def self_check(
    replicates: int = 20000,
    sizes: Iterable[int] = (4, 5),
    alphas: Iterable[float] = (1.0,),
    seed: int = 0,
    z_max: float = 3.0,
) -> OracleReport:
    """
    Run the oracle's consistency checks.

    Covers exact normalization of enumerations, pmf normalization and
    agreement with enumeration, the n/j mean law, URRT shape
    exchangeability, the hand-derived small-tree risks, and Monte Carlo
    agreement with exact risks (z-scores).

    Args:
        replicates: Monte Carlo replicates per (model, n)
        sizes: Tree sizes for the Monte Carlo comparison
        alphas: Weight exponents for the Monte Carlo comparison
        seed: Master seed
        z_max: Largest accepted |z| for Monte Carlo checks

    Returns:
        OracleReport
    """
    checks: List[CheckResult] = []

    for model in MODELS:
        for n in range(1, RECONCILE_LIMIT + 1):
            total = sum(h.probability for h in enumerate_histories(n, model))
            checks.append(CheckResult(f"{model}_histories_sum_n{n}", "1", str(total), 0.0, total == 1))

    worst = 0.0
    for n in (10, 100, 1000):
        for j in sorted({2, 3, n // 2, n}):
            for pmf in (urrt_descendant_pmf(n, j), pa_descendant_pmf(n, j)):
                worst = max(worst, abs(float(pmf.probabilities.sum()) - 1.0))
    checks.append(
        CheckResult("pmf_normalization", 0.0, worst, PMF_ATOL, worst <= PMF_ATOL)
    )

    for model in MODELS:
        gap = 0.0
        for n in range(2, RECONCILE_LIMIT + 1):
            for j in range(2, n + 1):
                formula = np.exp(_raw_log_pmf(model, n, j))
                gap = max(gap, float(np.max(np.abs(formula - enumerated_descendant_pmf(n, j, model)))))
        checks.append(CheckResult(f"{model}_pmf_vs_enumeration", 0.0, gap, PMF_ATOL, gap <= PMF_ATOL))

    for j in (2, 10, 100):
        observed = urrt_descendant_pmf(1000, j).mean() + 1.0
        expected = 1000.0 / j
        checks.append(
            CheckResult(f"urrt_mean_descendants_j{j}", expected, observed, 1e-8,
                        abs(observed - expected) <= 1e-8 * expected)
        )

    spread = max(_shape_exchangeability(n) for n in range(2, 8))
    checks.append(CheckResult("urrt_shape_exchangeability", 0.0, spread, 0.0, spread == 0.0))

    known = [
        ("urrt3_descendant_alpha1", 5 / 24, exact_risk(estimators.DESCENDANT, 3, 1.0, URRT)),
        ("urrt3_jordan_alpha1", 31 / 24, exact_risk(estimators.JORDAN, 3, 1.0, URRT)),
        ("urrt3_random_alpha1", 5 / 3, exact_risk(estimators.RANDOM, 3, 1.0, URRT)),
    ]
    for name, expected, observed in known:
        checks.append(CheckResult(name, expected, observed, 1e-12, abs(observed - expected) <= 1e-12))

    stated = stated_pa_zero_probability(4, 2)
    urn = pa_descendant_pmf(4, 2)(0)
    checks.append(
        CheckResult("pa_stated_zero_case_n4_i2", stated, urn, PMF_ATOL,
                    abs(stated - urn) <= PMF_ATOL, advisory=True)
    )

    alphas = list(alphas)
    for model in MODELS:
        for n in sizes:
            estimates = monte_carlo_risk(model, n, alphas, EXACT_ESTIMATORS, replicates, seed)
            for (name, alpha), (mean, stderr) in sorted(estimates.items()):
                exact = exact_risk(name, n, alpha, model)
                z = abs(mean - exact) / stderr if stderr > 0 else (0.0 if mean == exact else float("inf"))
                checks.append(
                    CheckResult(f"{model}_n{n}_{name}_alpha{alpha:g}_monte_carlo",
                                exact, mean, z_max, z <= z_max, z=z)
                )
                logger.debug("%s n=%d %s alpha=%g: z=%.2f", model, n, name, alpha, z)

    report = OracleReport(checks)
    for failure in report.failures:
        logger.error("Oracle check failed: %s (expected %s, observed %s)",
                     failure.name, failure.expected, failure.observed)
    return report
