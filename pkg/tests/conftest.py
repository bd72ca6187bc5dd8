"""
Test configuration and fixtures.
"""

import os

import numpy as np
import pytest

from arbor import Arbor
from arbor.models import LabeledTree, RecursiveTree
from arbor.rng import make_rng


# Fixed seed for every randomized test; override to explore other streams
TEST_SEED = int(os.environ.get("ARBOR_TEST_SEED", "20240611"))


@pytest.fixture
def rng():
    """A seeded generator."""
    return make_rng(TEST_SEED)


@pytest.fixture
def arbor_client():
    """An Arbor facade with the test seed."""
    return Arbor(seed=TEST_SEED)


@pytest.fixture
def path4() -> LabeledTree:
    """The path 1 - 2 - 3 - 4."""
    return LabeledTree(4, [(1, 2), (2, 3), (3, 4)])


@pytest.fixture
def path6() -> LabeledTree:
    """The path 1 - 2 - 3 - 4 - 5 - 6."""
    return LabeledTree(6, [(i, i + 1) for i in range(1, 6)])


@pytest.fixture
def star5() -> LabeledTree:
    """Vertex 1 joined to leaves 2..5."""
    return LabeledTree(5, [(1, k) for k in range(2, 6)])


@pytest.fixture
def broom7() -> LabeledTree:
    """Handle 1 - 2 - 3 with bristles 4..7 on vertex 3."""
    return LabeledTree(7, [(1, 2), (2, 3), (3, 4), (3, 5), (3, 6), (3, 7)])


@pytest.fixture
def chain_recursive() -> RecursiveTree:
    """The recursive path 1 -> 2 -> 3 -> 4 -> 5."""
    return RecursiveTree([1, 2, 3, 4])


def descendants_from_parents(tree: RecursiveTree) -> np.ndarray:
    """de(t) for every rank, straight from the parent array."""
    sizes = np.ones(tree.n, dtype=np.int64)
    parent = tree.parent
    for t in range(tree.n, 1, -1):
        sizes[parent[t - 1] - 1] += sizes[t - 1]
    return sizes - 1
