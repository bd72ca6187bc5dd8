"""
Random recursive tree generators and label scrambling.
"""

import logging
from typing import Tuple

import numpy as np

from .exceptions import ArborError, InvalidSizeError
from .models import PA, URRT, GroundTruth, LabeledTree, RecursiveTree
from .rng import RngState

logger = logging.getLogger(__name__)


def _check_size(n: int) -> None:
    if n < 1:
        raise InvalidSizeError(f"Tree size must be at least 1, got {n}")


def generate_urrt(n: int, rng: RngState) -> RecursiveTree:
    """
    Grow a uniform random recursive tree.

    Vertex t attaches to a vertex drawn uniformly from 1..t-1, independently
    for each t.

    Args:
        n: Number of vertices
        rng: Random stream

    Returns:
        RecursiveTree distributed as URRT(n)

    Raises:
        InvalidSizeError: If n < 1
    """
    _check_size(n)
    if n == 1:
        return RecursiveTree([])
    existing = np.arange(1, n)
    parents = 1 + np.floor(rng.random(n - 1) * existing).astype(np.int64)
    # guards the floating-point edge U * m rounding up to m
    np.minimum(parents, existing, out=parents)
    return RecursiveTree(parents)


def generate_pa(n: int, rng: RngState) -> RecursiveTree:
    """
    Grow a linear preferential attachment tree.

    The size-2 tree is the edge (1, 2). For t >= 3, vertex t attaches to the
    owner of a uniformly chosen half-edge, i.e. to v with probability
    deg(v) / (2(t - 2)). Half-edges live in an append-only array, so each
    step costs O(1).

    Args:
        n: Number of vertices
        rng: Random stream

    Returns:
        RecursiveTree distributed as PA(n)

    Raises:
        InvalidSizeError: If n < 1
    """
    _check_size(n)
    if n == 1:
        return RecursiveTree([])
    parents = np.empty(n - 1, dtype=np.int64)
    parents[0] = 1
    half_edges = np.empty(2 * (n - 1), dtype=np.int64)
    half_edges[0], half_edges[1] = 1, 2
    uniforms = rng.random(max(n - 2, 0))
    for t in range(3, n + 1):
        filled = 2 * (t - 2)
        pick = min(int(uniforms[t - 3] * filled), filled - 1)
        target = half_edges[pick]
        parents[t - 2] = target
        half_edges[filled] = target
        half_edges[filled + 1] = t
    return RecursiveTree(parents)


GENERATORS = {
    URRT: generate_urrt,
    PA: generate_pa,
}


def generate(model: str, n: int, rng: RngState) -> RecursiveTree:
    """
    Grow a tree from the named model.

    Raises:
        ArborError: If the model is unknown
    """
    try:
        generator = GENERATORS[model]
    except KeyError:
        raise ArborError(f"Unknown tree model '{model}', expected one of {sorted(GENERATORS)}")
    return generator(n, rng)


def shuffle_labels(tree: RecursiveTree, rng: RngState) -> Tuple[LabeledTree, GroundTruth]:
    """
    Hide the arrival order behind a uniformly random relabeling.

    Rank t receives label pi(t); the returned ground truth maps each label
    back to its rank.

    Args:
        tree: Tree in arrival coordinates
        rng: Random stream

    Returns:
        Tuple of (observed labeled tree, hidden ground truth)
    """
    pi = rng.permutation(tree.n) + 1
    sigma = np.empty(tree.n, dtype=np.int64)
    sigma[pi - 1] = np.arange(1, tree.n + 1)
    children = np.arange(2, tree.n + 1)
    edges = zip(pi[tree.parent[1:] - 1].tolist(), pi[children - 1].tolist())
    labeled = LabeledTree(tree.n, edges)
    logger.debug("Shuffled labels of a %d-vertex tree", tree.n)
    return labeled, GroundTruth(sigma)
