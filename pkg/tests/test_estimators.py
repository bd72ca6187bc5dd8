"""
Tests for ordering estimators.
"""

import itertools

import numpy as np
import pytest
from scipy.stats import chi2_contingency, chisquare, ks_2samp

from arbor import centrality, estimators, treegen
from arbor.models import DESCENDING, PA, URRT, LabeledTree, Ordering, ScoreVector
from arbor.rng import make_rng


@pytest.mark.unit
class TestTieBlocks:
    """Test grouping of equal scores."""

    def test_blocks_partition_ranks(self):
        """Test that blocks follow score order and cover 1..n."""
        blocks = estimators.tie_blocks(ScoreVector([2, 1, 2, 3, 1]))
        assert [(b.first_rank, b.last_rank) for b in blocks] == [(1, 2), (3, 4), (5, 5)]
        assert [sorted(b.labels.tolist()) for b in blocks] == [[2, 5], [1, 3], [4]]

    def test_descending(self):
        """Test that descending scores put the largest first."""
        blocks = estimators.tie_blocks(ScoreVector([1, 3, 2], DESCENDING))
        assert [b.labels.tolist() for b in blocks] == [[2], [3], [1]]

    def test_empty(self):
        """Test that no scores give no blocks."""
        assert estimators.tie_blocks(ScoreVector([])) == []


@pytest.mark.unit
class TestOrderByScores:
    """Test score-based ranking with random tie-breaking."""

    def test_distinct_scores(self, rng):
        """Test that distinct scores give a fixed ranking."""
        ordering = estimators.order_by_scores(ScoreVector([0.3, 0.1, 0.2]), rng)
        assert ordering.rank.tolist() == [3, 1, 2]

    def test_ties_uniform(self):
        """Test that a three-way tie is broken uniformly over its 6 arrangements."""
        rng = make_rng(3)
        scores = ScoreVector([0, 1, 1, 1])
        index = {p: i for i, p in enumerate(itertools.permutations([2, 3, 4]))}
        counts = np.zeros(6)
        for _ in range(6000):
            ordering = estimators.order_by_scores(scores, rng)
            assert ordering.rank_of(1) == 1
            counts[index[tuple(ordering.rank[1:].tolist())]] += 1
        assert chisquare(counts).pvalue > 1e-4


@pytest.mark.unit
class TestCentralityOrderings:
    """Test the Jordan, descendant and degree orderings."""

    def test_descendant_recovers_path(self, path6, rng):
        """Test that the descendant ordering is exact on a path rooted at an end."""
        ordering = estimators.descendant_ordering(path6, 1, rng)
        assert ordering.sequence().tolist() == [1, 2, 3, 4, 5, 6]

    def test_jordan_starts_at_centroid(self, broom7, rng):
        """Test that the Jordan ordering ranks the centroid first."""
        assert estimators.jordan_ordering(broom7, rng).rank_of(3) == 1

    def test_degree_starts_at_hub(self, star5, rng):
        """Test that the degree ordering ranks the hub first."""
        assert estimators.degree_ordering(star5, rng).rank_of(1) == 1

    def test_random_is_permutation(self, rng):
        """Test the random baseline."""
        ordering = estimators.random_ordering(50, rng)
        assert sorted(ordering.rank.tolist()) == list(range(1, 51))

    @pytest.mark.parametrize("model", [URRT, PA])
    def test_coupled_orderings(self, model):
        """Test the coupled draw: marginals are valid and off-path members keep the Jordan order."""
        rng = make_rng(17)
        for _ in range(20):
            labeled, truth = treegen.shuffle_labels(treegen.generate(model, 300, rng), rng)
            jordan, descendant = estimators.coupled_jordan_descendant(labeled, truth.root, rng)

            psi = centrality.jordan_centrality(labeled).values
            de = centrality.descendant_counts(labeled, truth.root)
            assert np.all(np.diff(psi[jordan.sequence() - 1]) >= 0)
            assert np.all(np.diff(de[descendant.sequence() - 1]) <= 0)

            path = set(centrality.centroid(labeled, truth.root).path_root_to_centroid)
            off = [u for u in jordan.sequence().tolist() if u not in path]
            off_by_descendant = [u for u in descendant.sequence().tolist() if u not in path]
            assert off == off_by_descendant


@pytest.mark.unit
class TestReverseDMC:
    """Test reverse peeling."""

    def test_path_is_recursive(self, path6, rng):
        """Test that peeling a path yields a recursive ordering."""
        ordering = estimators.reverse_dmc_ordering(path6, rng)
        assert estimators.is_recursive_ordering(path6, ordering)

    def test_star_peels_leaves_first(self, star5, rng):
        """Test that the hub survives until the last two vertices."""
        ordering = estimators.reverse_dmc_ordering(star5, rng)
        assert ordering.rank_of(1) <= 2

    def test_prefers_leaves_of_hubs(self, rng):
        """Test that a leaf on a high-degree vertex is peeled before a leaf on a low-degree one."""
        # 1 is a hub with leaves 3..6; 2 hangs off 1 and carries leaf 7
        tree = LabeledTree(7, [(1, 2), (1, 3), (1, 4), (1, 5), (1, 6), (2, 7)])
        ordering = estimators.reverse_dmc_ordering(tree, rng)
        assert ordering.rank_of(7) < max(ordering.rank_of(k) for k in (3, 4, 5, 6))

    def test_single_vertex(self, rng):
        """Test the one-vertex tree."""
        assert estimators.reverse_dmc_ordering(LabeledTree(1, []), rng).rank.tolist() == [1]


@pytest.mark.unit
class TestSpectralOrdering:
    """Test spectral seriation."""

    def test_path_is_monotone(self, path6, rng):
        """Test that the Fiedler ordering of a path runs end to end."""
        sequence = estimators.spectral_ordering(path6, rng).sequence().tolist()
        assert sequence in ([1, 2, 3, 4, 5, 6], [6, 5, 4, 3, 2, 1])

    def test_single_vertex(self, rng):
        """Test the one-vertex tree."""
        assert estimators.spectral_ordering(LabeledTree(1, []), rng).rank.tolist() == [1]

    def test_large_tree(self, rng):
        """Test that the matrix-free path returns a valid ordering."""
        tree = treegen.generate_pa(400, rng).to_labeled()
        ordering = estimators.spectral_ordering(tree, rng)
        assert ordering.n == 400


@pytest.mark.unit
class TestRecursiveCheck:
    """Test the recursive-ordering check."""

    def test_identity_on_recursive_tree(self, rng):
        """Test that arrival order is recursive."""
        tree = treegen.generate_urrt(100, rng)
        assert estimators.is_recursive_ordering(tree.to_labeled(), Ordering(np.arange(1, 101)), root=1)

    def test_two_earlier_neighbors(self, path4):
        """Test that a vertex with two earlier neighbors fails."""
        assert not estimators.is_recursive_ordering(path4, Ordering.from_sequence([1, 3, 2, 4]))

    def test_wrong_root(self, path4):
        """Test the optional root constraint."""
        ordering = Ordering.from_sequence([2, 1, 3, 4])
        assert estimators.is_recursive_ordering(path4, ordering)
        assert not estimators.is_recursive_ordering(path4, ordering, root=1)

    @pytest.mark.parametrize("model", [URRT, PA])
    def test_estimators_are_recursive(self, model):
        """Test that Jordan, descendant and reverse-DMC orderings are always recursive."""
        rng = make_rng(23)
        for _ in range(60):
            labeled, truth = treegen.shuffle_labels(treegen.generate(model, 150, rng), rng)
            for ordering in (
                estimators.jordan_ordering(labeled, rng),
                estimators.descendant_ordering(labeled, truth.root, rng),
                estimators.reverse_dmc_ordering(labeled, rng),
            ):
                assert estimators.is_recursive_ordering(labeled, ordering)

    def test_degree_can_break_recursiveness(self):
        """Test a tree where the degree ordering cannot be recursive."""
        # hubs 1 and 3 are joined only through the degree-2 vertex 2
        tree = LabeledTree(9, [(1, 2), (2, 3), (1, 4), (1, 5), (1, 6), (3, 7), (3, 8), (3, 9)])
        ordering = estimators.degree_ordering(tree, make_rng(0))
        assert not estimators.is_recursive_ordering(tree, ordering)


@pytest.mark.unit
def test_registries_keep_the_root_private():
    """Test that only the descendant ordering takes the true root."""
    assert set(estimators.ORACLE_ASSISTED) == {estimators.DESCENDANT}
    assert estimators.DESCENDANT not in estimators.LABEL_ONLY
    assert set(estimators.ESTIMATORS) == {
        "jordan", "descendant", "degree", "spectral", "reverse_dmc", "random",
    }


def sequence_counts(draw, draws: int) -> dict:
    counts: dict = {}
    for _ in range(draws):
        key = tuple(draw().sequence().tolist())
        counts[key] = counts.get(key, 0) + 1
    return counts


def same_law(first: dict, second: dict) -> float:
    """p-value of a chi-square test that two sets of sequence counts share one law."""
    keys = sorted(set(first) | set(second))
    table = np.array([[first.get(k, 0) for k in keys], [second.get(k, 0) for k in keys]])
    return chi2_contingency(table).pvalue


@pytest.mark.slow
class TestTieBreakingLaws:
    """Test the distributions produced by random tie-breaking."""

    def test_coupled_jordan_marginal(self, star5):
        """Test that the coupled Jordan ordering has the law of the plain one."""
        rng = make_rng(51)
        coupled = sequence_counts(lambda: estimators.coupled_jordan_descendant(star5, 2, rng)[0], 6000)
        plain = sequence_counts(lambda: estimators.jordan_ordering(star5, rng), 6000)
        assert len(coupled) == len(plain) == 24
        assert same_law(coupled, plain) > 1e-4

    @pytest.mark.parametrize("fixture, root", [("star5", 2), ("broom7", 4)])
    def test_coupled_descendant_marginal(self, request, fixture, root):
        """Test that the coupled descendant ordering has the law of the plain one."""
        tree = request.getfixturevalue(fixture)
        rng = make_rng(53)
        coupled = sequence_counts(lambda: estimators.coupled_jordan_descendant(tree, root, rng)[1], 6000)
        plain = sequence_counts(lambda: estimators.descendant_ordering(tree, root, rng), 6000)
        assert set(coupled) == set(plain)
        assert same_law(coupled, plain) > 1e-4

    def test_jordan_label_invariance(self, broom7):
        """Test that relabeling does not change the law of a tied vertex's Jordan rank."""
        before = np.empty(10000)
        after = np.empty(10000)
        for seed in range(10000):
            rng = make_rng(seed)
            before[seed] = estimators.jordan_ordering(broom7, rng).rank_of(4)
            perm = rng.permutation(broom7.n) + 1
            after[seed] = estimators.jordan_ordering(broom7.relabel(perm), rng).rank_of(int(perm[3]))
        assert set(np.unique(before)) == {3, 4, 5, 6, 7}
        assert ks_2samp(before, after).pvalue > 0.01
