"""
Tests for the weighted risk, bound curves and rate fits.
"""

import math

import numpy as np
import pytest

from arbor import risk
from arbor.exceptions import LabelError, RiskError
from arbor.models import PA, URRT, GroundTruth, Ordering, RiskSample


def samples_for(sizes, risk_of, estimator="jordan", replicates=4):
    return [
        RiskSample(URRT, n, 1.0, estimator, rep, rep, risk_of(n, rep))
        for n in sizes
        for rep in range(replicates)
    ]


@pytest.mark.unit
class TestRiskAlpha:
    """Test the realized weighted risk."""

    def test_zero_for_truth(self):
        """Test that the true ranks have zero risk."""
        truth = GroundTruth([3, 1, 2])
        assert risk.risk_alpha(Ordering([3, 1, 2]), truth, 1.0) == 0.0

    def test_reversal(self):
        """Test identity against reversal at n = 3: 2 + 0 + 2/3."""
        value = risk.risk_alpha(Ordering([3, 2, 1]), GroundTruth([1, 2, 3]), 1.0)
        assert value == pytest.approx(8 / 3)

    def test_unweighted(self):
        """Test that alpha = 0 is the plain L1 distance."""
        assert risk.risk_alpha(Ordering([3, 2, 1]), GroundTruth([1, 2, 3]), 0.0) == 4.0

    def test_size_mismatch(self):
        """Test that different label sets raise LabelError."""
        with pytest.raises(LabelError):
            risk.risk_alpha(Ordering([1, 2]), GroundTruth([1, 2, 3]), 1.0)

    def test_negative_alpha(self):
        """Test that alpha < 0 raises RiskError."""
        with pytest.raises(RiskError):
            risk.risk_alpha(Ordering([1, 2]), GroundTruth([2, 1]), -0.5)

    def test_non_increasing_in_alpha(self, rng):
        """Test that heavier weighting never increases the risk."""
        truth = GroundTruth(rng.permutation(40) + 1)
        estimate = Ordering(rng.permutation(40) + 1)
        values = [risk.risk_alpha(estimate, truth, a) for a in (0.0, 0.5, 1.0, 1.5, 2.0, 3.0)]
        assert all(a >= b for a, b in zip(values, values[1:]))

    def test_regime_flag(self):
        """Test the trivial-regime flag."""
        assert risk.regime(0.5) == risk.TRIVIAL_REGIME
        assert risk.regime(1.0) is None


@pytest.mark.unit
class TestBounds:
    """Test the reference bound curves."""

    def test_lower_bound_in_range(self):
        """Test n^(2 - alpha) / 70 at the smallest valid sizes."""
        assert risk.lower_bound(200, 1.0, URRT) == pytest.approx(200 / 70)
        assert risk.lower_bound(300, 1.0, PA) == pytest.approx(300 / 70)

    def test_lower_bound_floor(self):
        """Test that the 1/2 floor applies for large alpha and small n."""
        assert risk.lower_bound(1000, 2.0, URRT) == 0.5
        assert risk.lower_bound(199, 1.0, URRT) == 0.5
        assert risk.lower_bound(299, 1.0, PA) == 0.5
        assert risk.lower_bound(10_000, 0.0, URRT) == 0.5

    def test_lower_bound_errors(self):
        """Test unknown models and negative alpha."""
        with pytest.raises(RiskError):
            risk.lower_bound(500, 1.0, "ba")
        with pytest.raises(RiskError):
            risk.lower_bound(500, -1.0, URRT)

    def test_leading_constants(self):
        """Test K(1) for both models."""
        assert risk.urrt_leading_constant(1.0) == pytest.approx(4 + 2 * math.e ** 2)
        assert risk.pa_leading_constant(1.0) == pytest.approx(2 + 66 * math.sqrt(2))

    def test_leading_constant_ranges(self):
        """Test that K is undefined outside its alpha range."""
        with pytest.raises(RiskError):
            risk.urrt_leading_constant(2.0)
        with pytest.raises(RiskError):
            risk.pa_leading_constant(1.5)

    def test_upper_bound_urrt(self):
        """Test both branches of the URRT upper bound."""
        n = 1000
        expected = (4 + 2 * math.e ** 2) * n + np.sum(1.0 / np.arange(1, n + 1)) + math.log(n) ** 4
        assert risk.upper_bound_urrt(n, 1.0) == pytest.approx(expected)
        assert risk.upper_bound_urrt(n, 2.5) == pytest.approx(math.log(n) ** 4)

    def test_upper_bound_pa_heavy_weights(self):
        """Test c n^(3/2) for alpha >= 3/2."""
        assert risk.upper_bound_pa(400, 1.5) == pytest.approx(8000.0)
        assert risk.upper_bound_pa(400, 2.0, c=2.0) == pytest.approx(16000.0)

    def test_upper_bounds_need_alpha_one(self):
        """Test that upper bounds reject alpha < 1."""
        with pytest.raises(RiskError):
            risk.upper_bound_urrt(100, 0.5)
        with pytest.raises(RiskError):
            risk.upper_bound_pa(100, 0.9)

    def test_upper_dominates_lower(self):
        """Test that the upper curve sits above the lower one."""
        for n in (500, 2000, 8000):
            for alpha in (1.0, 1.25):
                assert risk.upper_bound_urrt(n, alpha) > risk.lower_bound(n, alpha, URRT)
                assert risk.upper_bound_pa(n, alpha) > risk.lower_bound(n, alpha, PA)

    def test_descendant_bound(self):
        """Test both branches of the descendant bound."""
        assert risk.descendant_bound_urrt(60) == 1080.0
        small = 3 + math.log(10) + (2 + 2 * math.e ** 2 + math.log(3)) * 10
        assert risk.descendant_bound_urrt(10) == pytest.approx(small)

    def test_optimality_ratio(self):
        """Test the ratio constants."""
        assert risk.optimality_ratio(1.0, URRT) == 1170.0
        assert risk.optimality_ratio(1.5, URRT) == pytest.approx(70 * (2 + 12 + 8))
        assert risk.optimality_ratio(1.0, PA) == pytest.approx(70 * (2 + 66 * math.sqrt(2)))
        with pytest.raises(RiskError):
            risk.optimality_ratio(2.0, URRT)
        with pytest.raises(RiskError):
            risk.optimality_ratio(1.0, "ba")

    def test_random_ordering_risk(self):
        """Test the exact random-permutation risk at n = 3."""
        assert risk.random_ordering_risk(3, 1.0) == pytest.approx(5 / 3)
        assert risk.random_ordering_risk(1, 1.0) == 0.0

    def test_random_ordering_risk_monte_carlo(self, rng):
        """Test the closed form against simulation."""
        truth = GroundTruth(np.arange(1, 31))
        draws = [risk.risk_alpha(Ordering(rng.permutation(30) + 1), truth, 1.0) for _ in range(4000)]
        stderr = np.std(draws, ddof=1) / np.sqrt(len(draws))
        assert abs(np.mean(draws) - risk.random_ordering_risk(30, 1.0)) < 4 * stderr

    def test_bound_curves(self):
        """Test the curves and status column of bounds.csv."""
        frame = risk.bound_curves(URRT, [100, 200], [0.5, 1.0])
        assert list(frame.columns) == ["model", "n", "alpha", "curve", "value", "status"]
        assert len(frame) == 10
        at_half = frame[frame["alpha"] == 0.5]
        assert set(at_half["curve"]) == {"lower", "random"}
        assert set(at_half["status"]) == {risk.AUTHORITATIVE, risk.TRIVIAL_REGIME}
        upper = frame[frame["curve"] == "upper"]
        assert set(upper["status"]) == {risk.UNSPECIFIED}

    def test_bound_curves_pa(self):
        """Test that the descendant curve is URRT-only."""
        frame = risk.bound_curves(PA, [400], [1.0, 1.5])
        assert "descendant_upper" not in set(frame["curve"])
        assert len(frame) == 4


@pytest.mark.unit
class TestRateRegression:
    """Test growth-exponent fitting."""

    def test_exact_power_law(self):
        """Test that 7 n^0.5 gives slope 0.5 and r2 = 1."""
        fit = risk.rate_regression([(n, 7 * n ** 0.5) for n in (100, 400, 1600, 6400)])
        assert fit.slope == pytest.approx(0.5)
        assert fit.intercept == pytest.approx(math.log(7))
        assert fit.r_squared == pytest.approx(1.0)
        assert fit.sizes == (100, 400, 1600, 6400)

    def test_constant(self):
        """Test that a constant risk has slope 0."""
        fit = risk.rate_regression([(n, 3.0) for n in (10, 20, 40)])
        assert fit.slope == pytest.approx(0.0)

    def test_single_size(self):
        """Test that one distinct size is rejected."""
        with pytest.raises(RiskError, match="two distinct"):
            risk.rate_regression([(100, 1.0), (100, 2.0)])

    def test_non_positive_risk(self):
        """Test that log(0) is refused."""
        with pytest.raises(RiskError, match="positive"):
            risk.rate_regression([(10, 0.0), (20, 1.0)])


@pytest.mark.unit
class TestAggregation:
    """Test summaries and per-group fits."""

    def test_summarize_quartiles(self):
        """Test count, mean, median and quartiles of one cell."""
        samples = samples_for([10], lambda n, rep: rep + 1.0)
        (summary,) = risk.summarize(samples)
        assert summary.count == 4
        assert summary.mean == pytest.approx(2.5)
        assert summary.median == pytest.approx(2.5)
        assert summary.q1 == pytest.approx(1.75)
        assert summary.q3 == pytest.approx(3.25)

    def test_summarize_order_independent(self):
        """Test that input order does not change the summaries."""
        samples = samples_for([10, 20], lambda n, rep: n * (rep + 1.0))
        forward = [s.to_dict() for s in risk.summarize(samples)]
        backward = [s.to_dict() for s in risk.summarize(reversed(samples))]
        assert forward == backward

    def test_summarize_empty(self):
        """Test that no samples give no summaries."""
        assert risk.summarize([]) == []

    def test_samples_frame_sorted(self):
        """Test canonical row order."""
        samples = samples_for([20, 10], lambda n, rep: 1.0, replicates=2)
        frame = risk.samples_frame(reversed(samples))
        assert frame["n"].tolist() == [10, 10, 20, 20]
        assert frame["replicate"].tolist() == [0, 1, 0, 1]

    def test_fit_rates(self):
        """Test a fit per (model, alpha, estimator)."""
        samples = samples_for([100, 400, 1600], lambda n, rep: 2.0 * n)
        samples += samples_for([100, 400, 1600], lambda n, rep: 5.0, estimator="random")
        fits = risk.fit_rates(risk.summarize(samples))
        slopes = {fit.estimator: fit.slope for fit in fits}
        assert slopes["jordan"] == pytest.approx(1.0)
        assert slopes["random"] == pytest.approx(0.0)
        assert all(fit.model == URRT and fit.alpha == 1.0 for fit in fits)

    def test_fit_rates_statistic(self):
        """Test that an unknown statistic is rejected."""
        with pytest.raises(RiskError):
            risk.fit_rates([], statistic="mode")
