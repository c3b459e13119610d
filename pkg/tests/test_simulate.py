import math

import numpy as np
import pytest

from mddtest import (
    InvalidConfig,
    ReplicationFailed,
    SimulationConfig,
    gen_compound_symmetry_covariates,
    gen_mixture,
    gen_moving_average_covariates,
    gen_response,
    make_beta,
    monte_carlo_table,
    moving_average_params,
)
from mddtest.simulate import _draw_error, table_row_to_dict
from mddtest._streams import substream


class TestMovingAverage:
    def test_seed_determinism(self):
        a = gen_moving_average_covariates(50, 20, 10, seed=5, rep=3)
        b = gen_moving_average_covariates(50, 20, 10, seed=5, rep=3)
        np.testing.assert_array_equal(a, b)
        c = gen_moving_average_covariates(50, 20, 10, seed=5, rep=4)
        assert not np.array_equal(a, c)

    def test_params_fixed_across_replications(self):
        a1, m1 = moving_average_params(20, 10, seed=5)
        a2, m2 = moving_average_params(20, 10, seed=5)
        np.testing.assert_array_equal(a1, a2)
        np.testing.assert_array_equal(m1, m2)
        assert np.all((a1 > 0) & (a1 < 1))
        assert np.all((m1 > 2) & (m1 < 3))

    def test_window_one_distant_columns_uncorrelated(self):
        X = gen_moving_average_covariates(10_000, 6, 1, seed=9)
        r = np.corrcoef(X[:, 0], X[:, 4])[0, 1]
        assert abs(r) <= 3.0 / math.sqrt(10_000)

    @pytest.mark.slow
    def test_adjacent_column_correlation_matches_window_overlap(self):
        n, p, window, seed = 100_000, 8, 10, 31
        alphas, _ = moving_average_params(p, window, seed)
        predicted = (alphas[:-1] * alphas[1:]).sum() / (alphas * alphas).sum()
        X = gen_moving_average_covariates(n, p, window, seed=seed)
        sample = np.corrcoef(X[:, 3], X[:, 4])[0, 1]
        se = (1.0 - predicted**2) / math.sqrt(n)
        assert sample == pytest.approx(predicted, abs=3 * se)


class TestCompoundSymmetry:
    @pytest.mark.slow
    def test_marginals_and_correlation(self):
        X = gen_compound_symmetry_covariates(100_000, 5, seed=12)
        assert X[:, 2].var() == pytest.approx(1.0, abs=3 * math.sqrt(2.0 / 100_000))
        r = np.corrcoef(X[:, 0], X[:, 3])[0, 1]
        assert r == pytest.approx(0.5, abs=3 * 0.75 / math.sqrt(100_000))

    def test_determinism(self):
        a = gen_compound_symmetry_covariates(30, 4, seed=2, rep=1)
        b = gen_compound_symmetry_covariates(30, 4, seed=2, rep=1)
        np.testing.assert_array_equal(a, b)


class TestMakeBeta:
    def test_null(self):
        assert np.linalg.norm(make_beta("null", 10, 0.0)) == 0.0

    def test_dense_normalized(self):
        beta = make_beta("dense", 34, 0.06)
        nonzero = beta[beta != 0]
        assert len(nonzero) == 17
        assert nonzero[0] == pytest.approx(0.06 / math.sqrt(17), rel=1e-14)
        assert np.linalg.norm(beta) == pytest.approx(0.06, rel=1e-12)

    def test_sparse_normalized(self):
        beta = make_beta("sparse", 50, 0.06)
        nonzero = beta[beta != 0]
        assert len(nonzero) == 5
        assert nonzero[0] == pytest.approx(0.06 / math.sqrt(5), rel=1e-14)

    def test_dense_unit_indicator(self):
        beta = make_beta("dense_unit", 50, 100)
        assert beta.sum() == 50  # min(n // 2, p) ones
        beta2 = make_beta("dense_unit", 200, 100)
        assert beta2.sum() == 50

    def test_sparse_unit_indicator(self):
        beta = make_beta("sparse_unit", 50, 0)
        np.testing.assert_array_equal(beta[:5], 1.0)
        assert beta[5:].sum() == 0.0

    def test_sparse_needs_five_columns(self):
        with pytest.raises(InvalidConfig):
            make_beta("sparse", 4, 0.06)


class TestGenResponse:
    def test_null_linear_is_pure_error(self):
        X = gen_compound_symmetry_covariates(20, 5, seed=3)
        beta = np.zeros(5)
        y = gen_response("cs_linear", X, beta, "normal", seed=3, rep=0, error_params=(0.0, 1.0))
        eps = _draw_error("normal", (0.0, 1.0), 20, substream(3, 2, 0))
        np.testing.assert_array_equal(y, eps)

    def test_null_heteroscedastic_equals_null_linear(self):
        X = gen_compound_symmetry_covariates(20, 5, seed=3)
        beta = np.zeros(5)
        linear = gen_response("cs_linear", X, beta, "normal", seed=3)
        hetero = gen_response("cs_heteroscedastic_squared", X, beta, "normal", seed=3)
        np.testing.assert_array_equal(linear, hetero)

    def test_sqrt_model_on_zero_covariates_is_pure_error(self):
        X = np.zeros((20, 5))
        beta = np.ones(5)
        y = gen_response("cs_sqrt_quadratic", X, beta, "student_t", seed=4, error_params=(3.0,))
        eps = _draw_error("student_t", (3.0,), 20, substream(4, 2, 0))
        np.testing.assert_array_equal(y, eps)

    def test_inverse_sqrt_needs_signal(self):
        X = gen_compound_symmetry_covariates(10, 5, seed=1)
        with pytest.raises(InvalidConfig):
            gen_response("cs_inv_sqrt_quadratic", X, np.zeros(5), "normal", seed=1)

    def test_centered_errors_have_mean_zero(self):
        rng = substream(99, 0)
        for law, params in [("chi_sq_centered", (1.0,)), ("gamma_centered", (1.0, 0.5))]:
            draws = _draw_error(law, params, 200_000, rng)
            assert abs(draws.mean()) < 5 * draws.std() / math.sqrt(len(draws))


class TestGenMixture:
    def test_determinism(self):
        a = gen_mixture(30, 4, np.zeros(4), seed=8, rep=2)
        b = gen_mixture(30, 4, np.zeros(4), seed=8, rep=2)
        np.testing.assert_array_equal(a.y, b.y)
        np.testing.assert_array_equal(a.X, b.X)

    @pytest.mark.slow
    def test_sign_is_fair_coin_under_null(self):
        ds = gen_mixture(100_000, 2, np.zeros(2), seed=5)
        frac = float((ds.y > 0).mean())
        assert frac == pytest.approx(0.5, abs=3 * 0.5 / math.sqrt(100_000))

    def test_positive_branch_independent_of_covariates(self):
        ds = gen_mixture(50_000, 3, np.full(3, 0.2), seed=6)
        pos = ds.y > 0
        r = np.corrcoef(ds.y[pos], ds.X[pos, 0])[0, 1]
        assert abs(r) <= 3.0 / math.sqrt(pos.sum())


class TestMonteCarloTable:
    def test_single_replication_rate_binary(self):
        cfg = SimulationConfig(dgp="cs_linear", n=20, p=5, replications=1, seed=4)
        row = monte_carlo_table(cfg)
        assert all(rate in (0.0, 1.0) for rate in row.rejection_rates.values())

    def test_identical_seeds_identical_rows(self):
        cfg = SimulationConfig(dgp="ma_linear", n=20, p=8, T=3, replications=10, seed=44)
        a = monte_carlo_table(cfg)
        b = monte_carlo_table(cfg)
        assert table_row_to_dict(a) == table_row_to_dict(b)

    def test_replication_errors_carry_index(self):
        cfg = SimulationConfig(
            dgp="cs_inv_sqrt_quadratic", n=10, p=5, beta_mode="null", replications=3, seed=1
        )
        with pytest.raises(ReplicationFailed, match="replication 0"):
            monte_carlo_table(cfg)

    def test_quantile_and_bootstrap_paths(self):
        cfg = SimulationConfig(
            dgp="mixture_gamma",
            n=20,
            p=4,
            tau=0.25,
            replications=3,
            seed=7,
            calibration="bootstrap",
            bootstrap_draws=19,
        )
        row = monte_carlo_table(cfg)
        assert row.replications == 3
        assert sum(row.p_value_histogram) == 3

    def test_factorial_path(self):
        cfg = SimulationConfig(
            dgp="factorial_nonlinear",
            n=8,
            p=6,
            T=2,
            error="normal",
            error_params=(0.0, 4.0),
            replications=2,
            seed=10,
        )
        row = monte_carlo_table(cfg)
        assert row.replications == 2

    def test_config_validation(self):
        with pytest.raises(InvalidConfig):
            SimulationConfig(dgp="nope", n=20, p=5)
        with pytest.raises(InvalidConfig):
            SimulationConfig(dgp="cs_linear", n=20, p=5, tau=1.5)
        with pytest.raises(InvalidConfig):
            SimulationConfig(dgp="factorial_ma_linear", n=20, p=5, tau=0.5)
        with pytest.raises(InvalidConfig):
            SimulationConfig(dgp="cs_linear", n=20, p=5, error="lognormal")
        with pytest.raises(InvalidConfig):
            SimulationConfig(dgp="cs_linear", n=20, p=5, error="normal", error_params=(1.0,))
