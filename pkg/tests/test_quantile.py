import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mddtest import (
    DegenerateData,
    InvalidQuantile,
    empirical_quantile,
    quantile_independence_test,
    quantile_residuals,
)


class TestEmpiricalQuantile:
    def test_median_of_four(self):
        assert empirical_quantile([1.0, 2.0, 3.0, 4.0], 0.5) == 2.0

    def test_quarter_of_hundred(self):
        y = np.arange(1.0, 101.0)
        assert empirical_quantile(y, 0.25) == 25.0

    def test_ties(self):
        assert empirical_quantile([5.0, 5.0, 5.0, 9.0], 0.5) == 5.0

    def test_unsorted_input(self, rng):
        y = rng.permutation(np.arange(1.0, 101.0))
        assert empirical_quantile(y, 0.25) == 25.0

    def test_invalid_levels(self):
        for tau in (0.0, 1.0, -0.2, 1.5):
            with pytest.raises(InvalidQuantile):
                empirical_quantile([1.0, 2.0], tau)


class TestQuantileResiduals:
    def test_hand_example(self):
        w = quantile_residuals([1.0, 2.0, 3.0, 4.0], 0.5)
        np.testing.assert_array_equal(w, [-0.5, -0.5, 0.5, 0.5])

    def test_constant_response_all_low(self):
        w = quantile_residuals(np.full(6, 3.0), 0.3)
        np.testing.assert_allclose(w, 0.3 - 1.0)

    def test_two_values_only(self, rng):
        w = quantile_residuals(rng.standard_normal(50), 0.25)
        assert set(np.round(w, 12)) <= {0.25, -0.75}

    @settings(max_examples=30, deadline=None)
    @given(
        st.integers(min_value=1, max_value=40),
        st.floats(min_value=0.01, max_value=0.99),
        st.integers(min_value=0, max_value=2**32 - 1),
    )
    def test_counting_identity_distinct_values(self, n, tau, seed):
        rng = np.random.default_rng(seed)
        y = rng.permutation(np.arange(n, dtype=float))
        w = quantile_residuals(y, tau)
        low = int(np.count_nonzero(w == tau - 1.0))
        assert low == math.ceil(n * tau)
        total = float(w.sum())
        assert -1.0 < n * tau - math.ceil(n * tau) <= 0.0
        assert total == pytest.approx(n * tau - math.ceil(n * tau), abs=1e-9)


class TestQuantileIndependenceTest:
    def test_monotone_transform_bit_identity(self, rng):
        X = rng.standard_normal((20, 4))
        y = rng.standard_normal(20)  # distinct with probability one
        base = quantile_independence_test(X, y, 0.25)
        cubed = quantile_independence_test(X, y**3, 0.25)
        assert cubed.statistic == base.statistic
        assert cubed.p_value == base.p_value

    def test_constant_response_degenerate(self, rng):
        with pytest.raises(DegenerateData):
            quantile_independence_test(rng.standard_normal((10, 2)), np.ones(10), 0.5)

    def test_constant_covariates_degenerate(self, rng):
        with pytest.raises(DegenerateData):
            quantile_independence_test(np.ones((10, 2)), rng.standard_normal(10), 0.5)

    def test_variance_estimate_nonnegative(self, rng):
        r = quantile_independence_test(rng.standard_normal((15, 3)), rng.standard_normal(15), 0.4)
        assert r.variance_estimate > 0.0
        assert 0.0 <= r.p_value <= 1.0
        assert r.tau == 0.4

    def test_result_fields(self, rng):
        X = rng.standard_normal((12, 3))
        y = rng.standard_normal(12)
        r = quantile_independence_test(X, y, 0.75)
        assert r.n == 12 and r.p == 3 and r.calibration == "normal"
        assert r.quantile_estimate == empirical_quantile(y, 0.75)
