import math

import numpy as np
import pytest

from mddtest import (
    BootstrapPlan,
    Dataset,
    GeneSetCollection,
    InvalidInput,
    bh_step_up,
    mean_independence_test,
    quantile_independence_test,
    screen_gene_sets,
)
from mddtest._streams import substream


class TestBhStepUp:
    def test_hand_example(self):
        # thresholds are k * 0.05 / 5; only the two smallest qualify
        assert bh_step_up([0.01, 0.02, 0.2, 0.5, 0.9], 0.05) == [0, 1]

    def test_all_ones_rejects_none(self):
        assert bh_step_up([1.0] * 6, 0.05) == []

    def test_all_zeros_rejects_all(self):
        assert bh_step_up([0.0] * 6, 0.05) == [0, 1, 2, 3, 4, 5]

    def test_permutation_invariance(self, rng):
        p = rng.random(12) ** 2
        base = set(bh_step_up(p, 0.1))
        perm = rng.permutation(12)
        permuted = bh_step_up(p[perm], 0.1)
        assert {int(perm[i]) for i in permuted} == base

    def test_ties_at_threshold_all_rejected(self):
        # P_(2) = 0.02 qualifies at k = 2; the tied duplicate is rejected too.
        assert bh_step_up([0.02, 0.02, 0.9], 0.05) == [0, 1]

    def test_empty_rejected(self):
        with pytest.raises(InvalidInput):
            bh_step_up([], 0.05)

    def test_out_of_range_p_values(self):
        with pytest.raises(InvalidInput):
            bh_step_up([0.5, 1.2], 0.05)


class TestScreenGeneSets:
    @pytest.fixture
    def dataset(self, rng):
        return Dataset(
            y=rng.standard_normal(40),
            X=rng.standard_normal((40, 6)),
            column_names=[f"g{j}" for j in range(6)],
        )

    def test_single_set_equals_direct_test(self, dataset):
        sets = GeneSetCollection(sets=[("all", list(range(6)))])
        report = screen_gene_sets(dataset, sets, alpha=0.05)
        direct = mean_independence_test(dataset.X, dataset.y)
        assert report.results[0].p_value == direct.p_value
        assert report.results[0].statistic == direct.statistic

    def test_single_set_quantile(self, dataset):
        sets = GeneSetCollection(sets=[("all", list(range(6)))])
        report = screen_gene_sets(dataset, sets, method="quantile", tau=0.25)
        direct = quantile_independence_test(dataset.X, dataset.y, 0.25)
        assert report.results[0].p_value == direct.p_value

    def test_degenerate_set_excluded(self, rng):
        X = rng.standard_normal((30, 4))
        X[:, 2] = 5.0  # constant column
        ds = Dataset(y=rng.standard_normal(30), X=X, column_names=list("abcd"))
        sets = GeneSetCollection(sets=[("ok", [0, 1]), ("flat", [2]), ("ok2", [3])])
        report = screen_gene_sets(ds, sets, alpha=0.1)
        assert report.excluded_set_ids == ("flat",)
        flat = next(r for r in report.results if r.set_id == "flat")
        assert flat.error is not None and flat.p_value is None
        assert len([r for r in report.results if r.error is None]) == 2

    def test_bootstrap_screen_deterministic(self, dataset):
        sets = GeneSetCollection(sets=[("a", [0, 1]), ("b", [2, 3, 4])])
        plan = BootstrapPlan(draws=50, seed=3)
        r1 = screen_gene_sets(dataset, sets, calibration="bootstrap", plan=plan)
        r2 = screen_gene_sets(dataset, sets, calibration="bootstrap", plan=plan)
        assert [x.p_value for x in r1.results] == [x.p_value for x in r2.results]

    @pytest.mark.slow
    def test_null_rejection_rate_controlled(self):
        # 50 disjoint singleton sets, pure noise; the average rejected
        # fraction stays near zero and certainly below alpha plus noise.
        n_datasets, n_sets, n = 200, 50, 60
        sets = GeneSetCollection(sets=[(f"s{j}", [j]) for j in range(n_sets)])
        fractions = np.empty(n_datasets)
        for d in range(n_datasets):
            rng = substream(17, 1, d)
            ds = Dataset(
                y=rng.standard_normal(n),
                X=rng.standard_normal((n, n_sets)),
                column_names=[f"c{j}" for j in range(n_sets)],
            )
            report = screen_gene_sets(ds, sets, alpha=0.05)
            fractions[d] = len(report.rejected_set_ids) / n_sets
        se = fractions.std(ddof=1) / math.sqrt(n_datasets) if fractions.std() > 0 else 0.0
        assert fractions.mean() <= 0.05 + 3 * se

    @pytest.mark.slow
    def test_planted_signal_recovered(self):
        # Strong dense signal in sets 0..2 out of 50; those sets must be
        # rejected nearly always.
        n_datasets, n_sets, per_set, n = 60, 50, 2, 100
        p = n_sets * per_set
        sets = GeneSetCollection(
            sets=[(f"s{j}", [per_set * j, per_set * j + 1]) for j in range(n_sets)]
        )
        beta = np.zeros(p)
        beta[: 3 * per_set] = 1.0
        hits = np.zeros(3)
        for d in range(n_datasets):
            rng = substream(23, 1, d)
            X = rng.standard_normal((n, p))
            y = X @ beta + rng.standard_normal(n)
            ds = Dataset(y=y, X=X, column_names=[f"c{j}" for j in range(p)])
            report = screen_gene_sets(ds, sets, alpha=0.05)
            for j in range(3):
                hits[j] += f"s{j}" in report.rejected_set_ids
        assert np.all(hits / n_datasets >= 0.9)
