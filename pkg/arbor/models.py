"""
Data models for trees, orderings, scores and risk records.

Labels and arrival ranks are 1-based everywhere in the public API. Arrays
are positional: ``values[u - 1]`` belongs to label ``u``.
"""

from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import networkx as nx
import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .exceptions import InvalidSizeError, InvalidTreeError, LabelError, OracleError

ASCENDING = "ascending"
DESCENDING = "descending"

URRT = "urrt"
PA = "pa"
MODELS = (URRT, PA)

PMF_ATOL = 1e-12


class RecursiveTree:
    """
    A tree in arrival coordinates.

    Vertices are their arrival ranks 1..n; vertex 1 is the root and every
    later vertex t is attached to ``parent[t - 1] < t``.
    """

    def __init__(self, parents: Sequence[int]):
        """
        Build a tree from the parents of ranks 2..n.

        Args:
            parents: ``p2, p3, ..., pn`` (empty for the single-vertex tree)
        """
        tail = np.asarray(parents, dtype=np.int64).reshape(-1)
        self.parent: np.ndarray = np.concatenate((np.zeros(1, dtype=np.int64), tail))
        self.n: int = int(self.parent.size)
        self.validate()

    def validate(self) -> None:
        """Check recursiveness: 1 <= parent[t] < t for t = 2..n."""
        ranks = np.arange(2, self.n + 1)
        tail = self.parent[1:]
        if not np.all((tail >= 1) & (tail < ranks)):
            bad = int(ranks[~((tail >= 1) & (tail < ranks))][0])
            raise InvalidTreeError(
                f"Vertex {bad} has parent {int(self.parent[bad - 1])}, expected 1..{bad - 1}"
            )

    @property
    def parents(self) -> List[int]:
        """Parents of ranks 2..n."""
        return self.parent[1:].tolist()

    def edges(self) -> List[Tuple[int, int]]:
        """Edges as ``(parent, child)`` pairs in arrival order."""
        return [(int(p), t) for t, p in enumerate(self.parent[1:].tolist(), start=2)]

    def degrees(self) -> np.ndarray:
        """Degree of every vertex, indexed by rank - 1."""
        deg = np.bincount(self.parent[1:] - 1, minlength=self.n)
        deg[1:] += 1
        return deg

    def to_labeled(self) -> "LabeledTree":
        """The same tree with label = rank."""
        return LabeledTree(self.n, self.edges())

    def serialize(self) -> str:
        """Serialize as ``parents: p2 p3 ... pn``."""
        return "parents: " + " ".join(str(p) for p in self.parents)

    @classmethod
    def parse(cls, text: str) -> "RecursiveTree":
        """
        Parse the ``parents: p2 ... pn`` format.

        Raises:
            InvalidTreeError: If the header is missing or entries are not integers
        """
        text = text.strip()
        if not text.startswith("parents:"):
            raise InvalidTreeError("Expected a 'parents:' header")
        try:
            parents = [int(tok) for tok in text[len("parents:"):].split()]
        except ValueError as e:
            raise InvalidTreeError(f"Malformed parent entry: {e}")
        return cls(parents)

    def __eq__(self, other):
        if not isinstance(other, RecursiveTree):
            return NotImplemented
        return self.n == other.n and bool(np.array_equal(self.parent, other.parent))

    def __repr__(self):
        return f"<RecursiveTree: n={self.n}>"

    def to_dict(self) -> dict:
        """Convert the tree to a dictionary."""
        return {"n": self.n, "parents": self.parents}


class LabeledTree:
    """
    An observed tree: undirected edges between labels 1..n, no arrival information.
    """

    def __init__(self, n: int, edges: Iterable[Tuple[int, int]]):
        """
        Build a labeled tree and validate that it is a tree.

        Args:
            n: Number of vertices (>= 1)
            edges: Undirected edges ``(u, v)`` between 1-based labels

        Raises:
            InvalidSizeError: If n < 1
            InvalidTreeError: If the edges do not form a tree on n vertices
        """
        if n < 1:
            raise InvalidSizeError(f"Tree size must be at least 1, got {n}")
        self.n: int = int(n)

        pairs = np.asarray(list(edges), dtype=np.int64).reshape(-1, 2)
        if pairs.shape[0] != self.n - 1:
            raise InvalidTreeError(
                f"A tree on {self.n} vertices has {self.n - 1} edges, got {pairs.shape[0]}"
            )
        if pairs.size and (pairs.min() < 1 or pairs.max() > self.n):
            raise InvalidTreeError(f"Edge endpoints must lie in 1..{self.n}")
        if np.any(pairs[:, 0] == pairs[:, 1]):
            raise InvalidTreeError("Self-loops are not allowed")

        self.heads: np.ndarray = pairs[:, 0] - 1
        self.tails: np.ndarray = pairs[:, 1] - 1
        adj: List[List[int]] = [[] for _ in range(self.n)]
        for u, v in zip(self.heads.tolist(), self.tails.tolist()):
            adj[u].append(v)
            adj[v].append(u)
        self._adj: Tuple[Tuple[int, ...], ...] = tuple(tuple(nbrs) for nbrs in adj)

        if not self._is_connected():
            raise InvalidTreeError("Edges do not form a connected graph")

    def _is_connected(self) -> bool:
        if self.n == 1:
            return True
        graph = coo_matrix(
            (np.ones(self.n - 1, dtype=np.int8), (self.heads, self.tails)), shape=(self.n, self.n)
        )
        count, _ = connected_components(graph, directed=False)
        return count == 1

    @property
    def index_adjacency(self) -> Tuple[Tuple[int, ...], ...]:
        """Read-only neighbor lists in 0-based indices (label - 1), in edge order."""
        return self._adj

    @property
    def adjacency(self) -> List[List[int]]:
        """Sorted neighbor labels, indexed by label - 1."""
        return [sorted(v + 1 for v in nbrs) for nbrs in self._adj]

    def neighbors(self, label: int) -> List[int]:
        """Neighbor labels of ``label``."""
        self.check_label(label)
        return sorted(v + 1 for v in self._adj[label - 1])

    def check_label(self, label: int) -> None:
        """
        Raises:
            LabelError: If ``label`` is not in 1..n
        """
        if not 1 <= int(label) <= self.n:
            raise LabelError(f"Label {label} out of range 1..{self.n}")

    def edges(self) -> List[Tuple[int, int]]:
        """Edges as sorted ``(u, v)`` pairs with u < v."""
        lo = np.minimum(self.heads, self.tails) + 1
        hi = np.maximum(self.heads, self.tails) + 1
        return sorted(zip(lo.tolist(), hi.tolist()))

    def degrees(self) -> np.ndarray:
        """Degree of every label, indexed by label - 1."""
        return np.array([len(nbrs) for nbrs in self._adj], dtype=np.int64)

    def relabel(self, mapping: Sequence[int]) -> "LabeledTree":
        """
        Relabel the tree, label u becoming ``mapping[u - 1]``.

        Raises:
            LabelError: If ``mapping`` is not a permutation of 1..n
        """
        perm = np.asarray(mapping, dtype=np.int64)
        if perm.size != self.n or not np.array_equal(np.sort(perm), np.arange(1, self.n + 1)):
            raise LabelError("Relabeling must be a permutation of 1..n")
        return LabeledTree(self.n, zip(perm[self.heads].tolist(), perm[self.tails].tolist()))

    def to_networkx(self) -> nx.Graph:
        """Export to an undirected networkx graph on nodes 1..n."""
        graph = nx.Graph()
        graph.add_nodes_from(range(1, self.n + 1))
        graph.add_edges_from(self.edges())
        return graph

    def to_edge_list(self) -> str:
        """Serialize as ``n=<count>`` followed by one ``u v`` line per edge."""
        lines = [f"n={self.n}"] + [f"{u} {v}" for u, v in self.edges()]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_edge_list(cls, text: str) -> "LabeledTree":
        """
        Parse the edge-list text format.

        Raises:
            InvalidTreeError: If the header or an edge line is malformed
        """
        lines = [line.strip() for line in text.strip().splitlines() if line.strip()]
        if not lines or not lines[0].startswith("n="):
            raise InvalidTreeError("Expected an 'n=<count>' header")
        try:
            n = int(lines[0][2:])
            edges = []
            for line in lines[1:]:
                u, v = line.split()
                edges.append((int(u), int(v)))
        except ValueError as e:
            raise InvalidTreeError(f"Malformed edge list: {e}")
        return cls(n, edges)

    def __eq__(self, other):
        if not isinstance(other, LabeledTree):
            return NotImplemented
        return self.n == other.n and self.edges() == other.edges()

    def __repr__(self):
        return f"<LabeledTree: n={self.n}>"

    def to_dict(self) -> dict:
        """Convert the tree to a dictionary."""
        return {"n": self.n, "edges": [list(e) for e in self.edges()]}


class GroundTruth:
    """The hidden arrival ranks: ``sigma[u - 1]`` is the rank of label u."""

    def __init__(self, sigma: Sequence[int]):
        self.sigma: np.ndarray = np.asarray(sigma, dtype=np.int64).reshape(-1)
        self.n: int = int(self.sigma.size)
        if not np.array_equal(np.sort(self.sigma), np.arange(1, self.n + 1)):
            raise LabelError("sigma must be a permutation of 1..n")
        self.tau: np.ndarray = np.empty(self.n, dtype=np.int64)
        self.tau[self.sigma - 1] = np.arange(1, self.n + 1)

    @property
    def root(self) -> int:
        """Label of the first vertex."""
        return int(self.tau[0])

    def rank_of(self, label: int) -> int:
        return int(self.sigma[label - 1])

    def label_of(self, rank: int) -> int:
        return int(self.tau[rank - 1])

    def unscramble(self, tree: LabeledTree) -> RecursiveTree:
        """
        Relabel an observed tree by sigma, recovering arrival coordinates.

        Raises:
            InvalidTreeError: If the relabeled tree is not recursive
        """
        if tree.n != self.n:
            raise LabelError(f"Tree has {tree.n} labels, ground truth has {self.n}")
        a = self.sigma[tree.heads]
        b = self.sigma[tree.tails]
        child = np.maximum(a, b)
        if tree.n > 1 and not np.array_equal(np.sort(child), np.arange(2, self.n + 1)):
            raise InvalidTreeError("Ground truth does not induce a recursive ordering")
        parents = np.zeros(self.n + 1, dtype=np.int64)
        parents[child] = np.minimum(a, b)
        return RecursiveTree(parents[2:])

    def __repr__(self):
        return f"<GroundTruth: n={self.n}, root={self.root}>"

    def to_dict(self) -> dict:
        return {"sigma": self.sigma.tolist()}


class ScoreVector:
    """
    A score per label with the direction in which it ranks.

    ``ascending`` means a smaller score ranks earlier.
    """

    def __init__(self, values: Sequence[float], direction: str = ASCENDING):
        if direction not in (ASCENDING, DESCENDING):
            raise ValueError(f"direction must be '{ASCENDING}' or '{DESCENDING}'")
        self.values: np.ndarray = np.asarray(values)
        self.direction: str = direction
        if not np.all(np.isfinite(self.values)):
            raise ValueError("Scores must be finite")

    @property
    def n(self) -> int:
        return int(self.values.size)

    def score(self, label: int):
        return self.values[label - 1]

    def rank_keys(self) -> np.ndarray:
        """Keys that sort ascending in rank order."""
        return self.values if self.direction == ASCENDING else -self.values

    def __repr__(self):
        return f"<ScoreVector: n={self.n} ({self.direction})>"

    def to_dict(self) -> dict:
        return {"values": self.values.tolist(), "direction": self.direction}


class CentroidReport:
    """Centroid(s) of a tree and the path from a designated root to the first one."""

    def __init__(self, centroids: Sequence[int], psi_min: int, path_root_to_centroid: Sequence[int]):
        self.centroids: Tuple[int, ...] = tuple(int(c) for c in centroids)
        self.psi_min: int = int(psi_min)
        self.path_root_to_centroid: Tuple[int, ...] = tuple(int(v) for v in path_root_to_centroid)
        if not 1 <= len(self.centroids) <= 2:
            raise InvalidTreeError(f"A tree has one or two centroids, got {len(self.centroids)}")

    def __repr__(self):
        return f"<CentroidReport: centroids={self.centroids} psi_min={self.psi_min}>"

    def to_dict(self) -> dict:
        return {
            "centroids": list(self.centroids),
            "psi_min": self.psi_min,
            "path_root_to_centroid": list(self.path_root_to_centroid),
        }


class Ordering:
    """An estimated ranking: ``rank[u - 1]`` is the estimated arrival rank of label u."""

    def __init__(self, rank: Sequence[int]):
        self.rank: np.ndarray = np.asarray(rank, dtype=np.int64).reshape(-1)
        self.n: int = int(self.rank.size)
        if not np.array_equal(np.sort(self.rank), np.arange(1, self.n + 1)):
            raise LabelError("An ordering must use every rank 1..n exactly once")

    @classmethod
    def from_sequence(cls, labels: Sequence[int]) -> "Ordering":
        """Build an ordering from labels listed first to last."""
        seq = np.asarray(labels, dtype=np.int64)
        rank = np.empty(seq.size, dtype=np.int64)
        rank[seq - 1] = np.arange(1, seq.size + 1)
        return cls(rank)

    def rank_of(self, label: int) -> int:
        return int(self.rank[label - 1])

    def sequence(self) -> np.ndarray:
        """Labels listed by increasing estimated rank."""
        seq = np.empty(self.n, dtype=np.int64)
        seq[self.rank - 1] = np.arange(1, self.n + 1)
        return seq

    def __eq__(self, other):
        if not isinstance(other, Ordering):
            return NotImplemented
        return bool(np.array_equal(self.rank, other.rank))

    def __repr__(self):
        return f"<Ordering: n={self.n}>"

    def to_dict(self) -> dict:
        return {"rank": self.rank.tolist()}


class TieBlock:
    """Labels sharing one score value, occupying ranks ``first_rank .. first_rank + size - 1``."""

    def __init__(self, first_rank: int, labels: Sequence[int]):
        self.first_rank: int = int(first_rank)
        self.labels: np.ndarray = np.asarray(labels, dtype=np.int64)

    @property
    def size(self) -> int:
        return int(self.labels.size)

    @property
    def last_rank(self) -> int:
        return self.first_rank + self.size - 1

    def __repr__(self):
        return f"<TieBlock: ranks {self.first_rank}..{self.last_rank}>"


class TieBreakPlan:
    """One uniformly random arrangement per tie block."""

    def __init__(self, n: int, blocks: Sequence[TieBlock]):
        self.n = n
        self.blocks: List[TieBlock] = list(blocks)

    def to_ordering(self) -> Ordering:
        rank = np.empty(self.n, dtype=np.int64)
        for block in self.blocks:
            rank[block.labels - 1] = np.arange(block.first_rank, block.last_rank + 1)
        return Ordering(rank)


class EigenResult:
    """A converged Laplacian eigenpair."""

    def __init__(self, lambda2: float, vector: np.ndarray, residual: float, iterations: int):
        self.lambda2: float = float(lambda2)
        self.vector: np.ndarray = np.asarray(vector, dtype=float)
        self.residual: float = float(residual)
        self.iterations: int = int(iterations)

    def __repr__(self):
        return f"<EigenResult: lambda2={self.lambda2:.6g} residual={self.residual:.2e}>"

    def to_dict(self) -> dict:
        return {
            "lambda2": self.lambda2,
            "residual": self.residual,
            "iterations": self.iterations,
        }


RISK_SAMPLE_COLUMNS = ["model", "n", "alpha", "estimator", "replicate", "seed", "risk"]
RISK_SUMMARY_COLUMNS = ["model", "n", "alpha", "estimator", "count", "mean", "median", "q1", "q3"]
RATE_FIT_COLUMNS = ["model", "alpha", "estimator", "slope", "intercept", "r2"]


class RiskSample:
    """One realized risk value for a (model, n, alpha, estimator, replicate) cell."""

    def __init__(
        self,
        model: str,
        n: int,
        alpha: float,
        estimator: str,
        replicate: int,
        seed: int,
        risk: float,
    ):
        self.model = model
        self.n = int(n)
        self.alpha = float(alpha)
        self.estimator = estimator
        self.replicate = int(replicate)
        self.seed = int(seed)
        self.risk = float(risk)

    def key(self) -> tuple:
        return (self.model, self.n, self.alpha, self.estimator, self.replicate)

    def __repr__(self):
        return f"<RiskSample: {self.estimator} n={self.n} alpha={self.alpha} risk={self.risk:.4g}>"

    def to_dict(self) -> dict:
        return {
            "model": self.model,
            "n": self.n,
            "alpha": self.alpha,
            "estimator": self.estimator,
            "replicate": self.replicate,
            "seed": self.seed,
            "risk": self.risk,
        }


class RiskSummary:
    """Boxplot statistics of the risk over the replicates of one cell."""

    def __init__(self, data: dict):
        self.model: str = data["model"]
        self.n: int = int(data["n"])
        self.alpha: float = float(data["alpha"])
        self.estimator: str = data["estimator"]
        self.count: int = int(data["count"])
        self.mean: float = float(data["mean"])
        self.median: float = float(data["median"])
        self.q1: float = float(data["q1"])
        self.q3: float = float(data["q3"])

    def __repr__(self):
        return f"<RiskSummary: {self.estimator} n={self.n} alpha={self.alpha} median={self.median:.4g}>"

    def to_dict(self) -> dict:
        return {column: getattr(self, column) for column in RISK_SUMMARY_COLUMNS}


class RateFit:
    """Least-squares fit of log(risk) against log(n)."""

    def __init__(
        self,
        slope: float,
        intercept: float,
        r_squared: float,
        sizes: Sequence[int],
        model: Optional[str] = None,
        alpha: Optional[float] = None,
        estimator: Optional[str] = None,
    ):
        self.slope = float(slope)
        self.intercept = float(intercept)
        self.r_squared = float(r_squared)
        self.sizes: Tuple[int, ...] = tuple(int(s) for s in sizes)
        self.model = model
        self.alpha = alpha
        self.estimator = estimator

    def __repr__(self):
        return f"<RateFit: {self.estimator} alpha={self.alpha} slope={self.slope:.3f}>"

    def to_dict(self) -> dict:
        return {
            "model": self.model,
            "alpha": self.alpha,
            "estimator": self.estimator,
            "slope": self.slope,
            "intercept": self.intercept,
            "r2": self.r_squared,
        }


class Pmf:
    """A probability mass function on 0..max."""

    def __init__(self, probabilities: Sequence[float], atol: float = PMF_ATOL):
        self.probabilities: np.ndarray = np.asarray(probabilities, dtype=float)
        if np.any(self.probabilities < 0):
            raise OracleError("Probabilities must be non-negative")
        if abs(self.probabilities.sum() - 1.0) > atol:
            raise OracleError(f"Probabilities sum to {self.probabilities.sum()!r}, not 1")

    @classmethod
    def from_counts(cls, counts: Sequence[int], size: Optional[int] = None) -> "Pmf":
        """Empirical pmf from observed values (not bin counts)."""
        hist = np.bincount(np.asarray(counts, dtype=np.int64), minlength=size or 0)
        return cls(hist / hist.sum())

    @property
    def support(self) -> np.ndarray:
        return np.arange(self.probabilities.size)

    def __call__(self, k: int) -> float:
        if 0 <= k < self.probabilities.size:
            return float(self.probabilities[k])
        return 0.0

    def mean(self) -> float:
        return float(np.dot(self.support, self.probabilities))

    def total_variation(self, other: "Pmf") -> float:
        """Total-variation distance to another pmf."""
        size = max(self.probabilities.size, other.probabilities.size)
        p = np.pad(self.probabilities, (0, size - self.probabilities.size))
        q = np.pad(other.probabilities, (0, size - other.probabilities.size))
        return 0.5 * float(np.abs(p - q).sum())

    def __repr__(self):
        return f"<Pmf: support 0..{self.probabilities.size - 1}>"

    def to_dict(self) -> dict:
        return {"probabilities": self.probabilities.tolist()}


class WeightedHistory:
    """A complete growth history with its exact probability."""

    def __init__(self, tree: RecursiveTree, probability: Fraction):
        self.tree = tree
        self.probability = Fraction(probability)

    def __repr__(self):
        return f"<WeightedHistory: {self.tree.parents} p={self.probability}>"

    def to_dict(self) -> Dict[str, object]:
        return {"parents": self.tree.parents, "probability": str(self.probability)}


class CheckResult:
    """One oracle self-check: what was expected, what was observed, and whether it passed."""

    def __init__(
        self,
        name: str,
        expected: object,
        observed: object,
        tolerance: float,
        passed: bool,
        advisory: bool = False,
        z: Optional[float] = None,
    ):
        self.name = name
        self.expected = expected
        self.observed = observed
        self.tolerance = float(tolerance)
        self.passed = bool(passed)
        self.advisory = bool(advisory)
        self.z = None if z is None else float(z)

    def __repr__(self):
        status = "pass" if self.passed else ("advisory" if self.advisory else "FAIL")
        return f"<CheckResult: {self.name} {status}>"

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "expected": self.expected,
            "observed": self.observed,
            "tolerance": self.tolerance,
            "pass": self.passed,
            "advisory": self.advisory,
            "z": self.z,
        }


class OracleReport:
    """Collection of self-checks; advisory entries never fail the report."""

    def __init__(self, checks: Sequence[CheckResult]):
        self.checks: List[CheckResult] = list(checks)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks if not c.advisory)

    @property
    def failures(self) -> List[CheckResult]:
        return [c for c in self.checks if not c.passed and not c.advisory]

    def __repr__(self):
        return f"<OracleReport: {len(self.checks)} checks, {len(self.failures)} failures>"

    def to_dict(self) -> dict:
        return {"passed": self.passed, "checks": [c.to_dict() for c in self.checks]}
