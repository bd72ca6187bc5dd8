"""
Subtree sizes, Jordan centrality, centroids and descendant centrality.

All functions run in O(n) from a single breadth-first pass.
"""

from collections import deque
from typing import List, Tuple

import numpy as np

from .models import ASCENDING, DESCENDING, CentroidReport, LabeledTree, ScoreVector


def _bfs(tree: LabeledTree, root: int) -> Tuple[List[int], List[int]]:
    """Breadth-first order and parent pointers from a 0-based root (parent of root = -1)."""
    parent = [-1] * tree.n
    parent[root] = root
    order = [root]
    queue = deque([root])
    adj = tree.index_adjacency
    while queue:
        u = queue.popleft()
        for v in adj[u]:
            if parent[v] == -1:
                parent[v] = u
                order.append(v)
                queue.append(v)
    parent[root] = -1
    return order, parent


def _sizes(tree: LabeledTree, root: int) -> Tuple[List[int], List[int], List[int]]:
    order, parent = _bfs(tree, root)
    sizes = [1] * tree.n
    for u in reversed(order[1:]):
        sizes[parent[u]] += sizes[u]
    return sizes, order, parent


def subtree_sizes(tree: LabeledTree, root: int) -> ScoreVector:
    """
    Size of the subtree hanging from each vertex when the tree is rooted at ``root``.

    ``values[u - 1]`` counts the vertices w whose path to the root passes
    through u (u included); the root's value is n.

    Raises:
        LabelError: If ``root`` is out of range
    """
    tree.check_label(root)
    sizes, _, _ = _sizes(tree, root - 1)
    return ScoreVector(np.asarray(sizes, dtype=np.int64), DESCENDING)


def descendant_counts(tree: LabeledTree, root: int) -> np.ndarray:
    """Number of descendants de(u) of every label in the tree rooted at ``root``."""
    return subtree_sizes(tree, root).values - 1


def _psi(tree: LabeledTree) -> np.ndarray:
    n = tree.n
    sizes, order, parent = _sizes(tree, 0)
    psi = [n - s for s in sizes]
    for u in order[1:]:
        p = parent[u]
        if sizes[u] > psi[p]:
            psi[p] = sizes[u]
    return np.asarray(psi, dtype=np.int64)


def jordan_centrality(tree: LabeledTree) -> ScoreVector:
    """
    Jordan centrality: the size of the largest subtree hanging off each vertex.

    Computed as max(n - s(u), max over children w of s(w)) with s the subtree
    sizes from an arbitrary root. A single vertex has centrality 0.
    """
    return ScoreVector(_psi(tree), ASCENDING)


def centroid(tree: LabeledTree, root: int = 1) -> CentroidReport:
    """
    Minimizers of the Jordan centrality and the path to them from ``root``.

    When the tree has two centroids, the one nearer to ``root`` is listed
    first and ends the path.

    Raises:
        LabelError: If ``root`` is out of range
    """
    tree.check_label(root)
    psi = _psi(tree)
    psi_min = int(psi.min())
    members = set(np.flatnonzero(psi == psi_min).tolist())

    order, parent = _bfs(tree, root - 1)
    nearest = next(u for u in order if u in members)
    path = [nearest]
    while parent[path[-1]] != -1:
        path.append(parent[path[-1]])
    path.reverse()

    centroids = [nearest] + sorted(members - {nearest})
    return CentroidReport(
        centroids=[c + 1 for c in centroids],
        psi_min=psi_min,
        path_root_to_centroid=[v + 1 for v in path],
    )


def descendant_centrality(tree: LabeledTree, root: int) -> ScoreVector:
    """
    Descendant centrality n + 1 - de(u) for the tree rooted at the true root.

    Raises:
        LabelError: If ``root`` is out of range
    """
    de = descendant_counts(tree, root)
    return ScoreVector(tree.n + 1 - de, ASCENDING)


def degree_vector(tree: LabeledTree) -> ScoreVector:
    """Vertex degrees; larger degree ranks earlier."""
    return ScoreVector(tree.degrees(), DESCENDING)
