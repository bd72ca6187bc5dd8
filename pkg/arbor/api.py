"""
Main interface for tree generation, ordering and risk evaluation.
"""

import logging
from typing import Dict, Optional, Sequence, Tuple

import numpy as np

from . import estimators, risk, treegen
from .exceptions import ArborError, LabelError
from .models import GroundTruth, LabeledTree, Ordering, RecursiveTree
from .rng import RngState, make_rng

logger = logging.getLogger(__name__)


class Arbor:
    """
    Convenience wrapper around the generators, estimators and risk.

    All randomness comes from one generator seeded at construction.

    Example:
        >>> arbor = Arbor(seed=7)
        >>> tree, truth = arbor.observe(arbor.generate("pa", 1000))
        >>> ordering = arbor.order("jordan", tree)
        >>> arbor.risk(ordering, truth, alpha=1.0)
    """

    def __init__(self, seed: int = 0, rng: Optional[RngState] = None):
        """
        Initialize the interface.

        Args:
            seed: Master seed, ignored when ``rng`` is given
            rng: Generator to draw from instead of a fresh one
        """
        self.seed = seed
        self.rng = rng if rng is not None else make_rng(seed)

    def generate(self, model: str, n: int) -> RecursiveTree:
        """
        Grow a random recursive tree.

        Args:
            model: ``urrt`` or ``pa``
            n: Number of vertices

        Returns:
            RecursiveTree with labels equal to arrival ranks
        """
        return treegen.generate(model, n, self.rng)

    def observe(self, tree: RecursiveTree) -> Tuple[LabeledTree, GroundTruth]:
        """
        Hide the arrival order behind a uniformly random relabeling.

        Returns:
            Tuple of (observed tree, ground truth)
        """
        return treegen.shuffle_labels(tree, self.rng)

    def order(self, estimator: str, tree: LabeledTree, root: Optional[int] = None) -> Ordering:
        """
        Run an estimator on an observed tree.

        Args:
            estimator: One of ``jordan``, ``descendant``, ``degree``,
                ``spectral``, ``reverse_dmc``, ``random``
            tree: Observed tree
            root: The true first vertex; required by ``descendant`` only

        Returns:
            Estimated ordering

        Raises:
            ArborError: If the estimator is unknown
            LabelError: If ``descendant`` is called without a valid root
        """
        if estimator in estimators.ORACLE_ASSISTED:
            if root is None:
                raise LabelError(f"The {estimator} ordering needs the true root")
            tree.check_label(root)
            return estimators.ORACLE_ASSISTED[estimator](tree, root, self.rng)
        if estimator in estimators.LABEL_ONLY:
            return estimators.LABEL_ONLY[estimator](tree, self.rng)
        raise ArborError(f"Unknown estimator '{estimator}'; choose from {', '.join(estimators.ESTIMATORS)}")

    def risk(self, ordering: Ordering, truth: GroundTruth, alpha: float = 1.0) -> float:
        """Realized weighted risk of an ordering against the truth."""
        return risk.risk_alpha(ordering, truth, alpha)

    def estimate_risk(
        self,
        estimator: str,
        model: str,
        n: int,
        alphas: Sequence[float] = (1.0,),
        replicates: int = 10,
    ) -> Dict[float, Tuple[float, float]]:
        """
        Monte Carlo risk of an estimator.

        Args:
            estimator: Estimator name
            model: Growth model
            n: Tree size
            alphas: Weight exponents, all scored on the same trees
            replicates: Number of trees

        Returns:
            ``{alpha: (mean, standard error)}``
        """
        draws = {alpha: np.empty(replicates) for alpha in alphas}
        for rep in range(replicates):
            tree, truth = self.observe(self.generate(model, n))
            ordering = self.order(estimator, tree, truth.root)
            for alpha in alphas:
                draws[alpha][rep] = self.risk(ordering, truth, alpha)
        logger.debug("Estimated %s risk on %d %s trees of size %d", estimator, replicates, model, n)
        return {
            alpha: (
                float(values.mean()),
                float(values.std(ddof=1) / np.sqrt(replicates)) if replicates > 1 else float("nan"),
            )
            for alpha, values in draws.items()
        }
