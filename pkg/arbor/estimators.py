"""
Ordering procedures: score-based rankings with random tie-breaking, the
oracle-assisted descendant ordering and its coupling with the Jordan
ordering, reverse DMC peeling, spectral seriation and a random baseline.
"""

import logging
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np

from . import centrality, spectral
from .models import LabeledTree, Ordering, ScoreVector, TieBlock, TieBreakPlan
from .rng import RngState

logger = logging.getLogger(__name__)

JORDAN = "jordan"
DESCENDANT = "descendant"
DEGREE = "degree"
SPECTRAL = "spectral"
REVERSE_DMC = "reverse_dmc"
RANDOM = "random"


def tie_blocks(scores: ScoreVector) -> List[TieBlock]:
    """
    Group labels by equal score, in rank order.

    Returns:
        Blocks whose rank intervals partition 1..n
    """
    keys = scores.rank_keys()
    order = np.argsort(keys, kind="stable")
    sorted_keys = keys[order]
    if order.size == 0:
        return []
    starts = np.flatnonzero(np.r_[True, sorted_keys[1:] != sorted_keys[:-1]])
    ends = np.r_[starts[1:], order.size]
    return [TieBlock(start + 1, order[start:end] + 1) for start, end in zip(starts, ends)]


def order_by_scores(scores: ScoreVector, rng: RngState) -> Ordering:
    """
    Rank labels by score, breaking ties uniformly at random.

    Distinct scores are ranked strictly in the score's direction; each
    block of equal scores receives a uniformly random permutation of its
    rank interval.
    """
    blocks = []
    for block in tie_blocks(scores):
        if block.size > 1:
            block = TieBlock(block.first_rank, rng.permutation(block.labels))
        blocks.append(block)
    return TieBreakPlan(scores.n, blocks).to_ordering()


def jordan_ordering(tree: LabeledTree, rng: RngState) -> Ordering:
    """Order by increasing Jordan centrality."""
    return order_by_scores(centrality.jordan_centrality(tree), rng)


def descendant_ordering(tree: LabeledTree, root: int, rng: RngState) -> Ordering:
    """
    Order by decreasing number of descendants below the true root.

    Needs the true root, so it serves as an oracle-assisted benchmark rather
    than a practical estimator.
    """
    return order_by_scores(centrality.descendant_centrality(tree, root), rng)


def coupled_jordan_descendant(
    tree: LabeledTree,
    root: int,
    rng: RngState,
) -> Tuple[Ordering, Ordering]:
    """
    Draw the Jordan and descendant orderings with coupled tie-breaking.

    The Jordan ordering is drawn first. Within each block of equal
    descendant counts, members off the root-to-centroid path keep the
    relative order the Jordan ordering gave them, and members on the path
    are inserted into uniformly random slots of the block.

    Returns:
        Tuple of (Jordan ordering, descendant ordering)
    """
    jordan = jordan_ordering(tree, rng)
    report = centrality.centroid(tree, root)
    on_path = np.zeros(tree.n + 1, dtype=bool)
    on_path[list(report.path_root_to_centroid)] = True

    blocks = []
    for block in tie_blocks(centrality.descendant_centrality(tree, root)):
        labels = block.labels
        if block.size > 1:
            path_members = rng.permutation(labels[on_path[labels]])
            others = labels[~on_path[labels]]
            others = others[np.argsort(jordan.rank[others - 1], kind="stable")]
            slots = np.zeros(block.size, dtype=bool)
            slots[rng.choice(block.size, size=path_members.size, replace=False)] = True
            arranged = np.empty(block.size, dtype=np.int64)
            arranged[slots] = path_members
            arranged[~slots] = others
            labels = arranged
        blocks.append(TieBlock(block.first_rank, labels))
    return jordan, TieBreakPlan(tree.n, blocks).to_ordering()


def degree_ordering(tree: LabeledTree, rng: RngState) -> Ordering:
    """Order by decreasing degree; the result need not be recursive."""
    return order_by_scores(centrality.degree_vector(tree), rng)


def random_ordering(n: int, rng: RngState) -> Ordering:
    """A uniformly random permutation of 1..n."""
    return Ordering(rng.permutation(n) + 1)


class _Buckets:
    """Leaves bucketed by integer score with O(1) insert, remove and uniform pick."""

    def __init__(self, n: int):
        self.items: List[List[int]] = [[] for _ in range(n + 1)]
        self.where: Dict[int, Tuple[int, int]] = {}
        self.top = 0

    def add(self, leaf: int, score: int) -> None:
        bucket = self.items[score]
        self.where[leaf] = (score, len(bucket))
        bucket.append(leaf)
        if score > self.top:
            self.top = score

    def remove(self, leaf: int) -> None:
        score, pos = self.where.pop(leaf)
        bucket = self.items[score]
        last = bucket.pop()
        if last != leaf:
            bucket[pos] = last
            self.where[last] = (score, pos)

    def pop_max(self, rng: RngState) -> int:
        while not self.items[self.top]:
            self.top -= 1
        bucket = self.items[self.top]
        leaf = bucket[int(rng.integers(len(bucket)))]
        self.remove(leaf)
        return leaf


def reverse_dmc_ordering(tree: LabeledTree, rng: RngState) -> Ordering:
    """
    Peel leaves, always removing the one most likely to have arrived last.

    In a preferential attachment tree on m vertices, the likelihood that
    leaf v arrived last is (deg(parent(v)) - 1) / (2(m - 2)). The
    normalizer is shared by all leaves, so leaves compete on
    deg(parent) - 1; ties (including the final two vertices) are broken
    uniformly. The k-th removed vertex receives rank n - k + 1.
    """
    n = tree.n
    if n == 1:
        return Ordering([1])
    adj = [set(nbrs) for nbrs in tree.index_adjacency]
    degree = [len(nbrs) for nbrs in adj]
    buckets = _Buckets(n)
    for v in range(n):
        if degree[v] == 1:
            (p,) = adj[v]
            buckets.add(v, degree[p] - 1)

    rank = np.empty(n, dtype=np.int64)
    for m in range(n, 1, -1):
        leaf = buckets.pop_max(rng)
        rank[leaf] = m
        (p,) = adj[leaf]
        adj[p].discard(leaf)
        degree[p] -= 1
        if m == 2:
            rank[p] = 1
            break
        # p's remaining leaf neighbors lose one point of score
        for w in adj[p]:
            if degree[w] == 1:
                buckets.remove(w)
                buckets.add(w, degree[p] - 1)
        if degree[p] == 1:
            (q,) = adj[p]
            buckets.add(p, degree[q] - 1)
    return Ordering(rank)


def spectral_ordering(
    tree: LabeledTree,
    rng: RngState,
    tol: float = spectral.DEFAULT_TOL,
    max_iter: Optional[int] = None,
) -> Ordering:
    """
    Seriation by the oriented Fiedler vector, sorted by increasing entries.

    Raises:
        ConvergenceError: If the eigensolver fails
    """
    if tree.n == 1:
        return Ordering([1])
    result = spectral.fiedler_vector(tree, tol=tol, max_iter=max_iter, rng=rng)
    entries = spectral.orient(result.vector, centrality.degree_vector(tree), rng)
    return order_by_scores(ScoreVector(entries), rng)


def is_recursive_ordering(tree: LabeledTree, ordering: Ordering, root: Optional[int] = None) -> bool:
    """
    Check that every vertex after the first has exactly one earlier neighbor.

    Args:
        tree: Labeled tree
        ordering: Candidate ordering
        root: If given, the vertex that must be ranked first
    """
    rank = ordering.rank
    if root is not None and rank[root - 1] != 1:
        return False
    earlier = np.zeros(tree.n, dtype=np.int64)
    child_of_head = rank[tree.heads] > rank[tree.tails]
    np.add.at(earlier, np.where(child_of_head, tree.heads, tree.tails), 1)
    first = int(np.flatnonzero(rank == 1)[0])
    if earlier[first] != 0:
        return False
    earlier[first] = 1
    return bool(np.all(earlier == 1))


# estimators that see only the observed tree
LABEL_ONLY: Dict[str, Callable[[LabeledTree, RngState], Ordering]] = {
    JORDAN: jordan_ordering,
    DEGREE: degree_ordering,
    SPECTRAL: spectral_ordering,
    REVERSE_DMC: reverse_dmc_ordering,
    RANDOM: lambda tree, rng: random_ordering(tree.n, rng),
}

# estimators that also receive the true root
ORACLE_ASSISTED: Dict[str, Callable[[LabeledTree, int, RngState], Ordering]] = {
    DESCENDANT: descendant_ordering,
}

ESTIMATORS = tuple(sorted(set(LABEL_ONLY) | set(ORACLE_ASSISTED)))
