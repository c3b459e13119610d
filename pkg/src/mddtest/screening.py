"""Gene-set screening with false-discovery-rate control.

Runs the chosen independence test on the response against each named group
of covariate columns, then applies the Benjamini-Hochberg step-up rule to
the per-set p-values.  Sets whose test degenerates (for example a set of
all-constant columns) are excluded with a recorded reason, shrinking the
number of hypotheses entering the step-up rule.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._streams import child_seed
from .bootstrap import BootstrapPlan, bootstrap_mean_test, bootstrap_quantile_test
from .data import Dataset, GeneSetCollection
from .exceptions import DegenerateData, InvalidConfig, InvalidInput
from .mean import mean_independence_test
from .quantile import quantile_independence_test

__all__ = ["SetResult", "ScreeningReport", "bh_step_up", "screen_gene_sets"]

_SET_DOMAIN = 4


@dataclass(frozen=True)
class SetResult:
    """Per-set outcome: either a test result or the reason it was skipped."""

    set_id: str
    columns: tuple
    p_value: float | None
    statistic: float | None
    error: str | None = None


@dataclass(frozen=True)
class ScreeningReport:
    """All per-set results plus the step-up decision at the chosen level."""

    alpha: float
    method: str
    calibration: str
    results: tuple = field(default_factory=tuple)
    bh_threshold_index: int = 0
    rejected_set_ids: tuple = field(default_factory=tuple)
    excluded_set_ids: tuple = field(default_factory=tuple)


def _bh_threshold(p: np.ndarray, alpha: float) -> tuple[int, float]:
    """Largest step-up index ``k`` and its p-value cutoff (0, -inf if none)."""
    m = p.size
    sorted_p = np.sort(p)
    thresholds = alpha * np.arange(1, m + 1) / m
    passing = np.nonzero(sorted_p <= thresholds)[0]
    if passing.size == 0:
        return 0, -math.inf
    k = int(passing[-1]) + 1
    return k, float(sorted_p[k - 1])


def bh_step_up(p_values, alpha: float) -> list[int]:
    """Indices rejected by the Benjamini-Hochberg step-up rule.

    Finds the largest ``k`` with ``P_(k) <= k alpha / m`` over the sorted
    p-values and rejects every hypothesis with a p-value at most ``P_(k)``
    (so ties at the threshold are all rejected).  Returns a sorted index
    list, empty when no ``k`` qualifies.
    """
    p = np.asarray(p_values, dtype=float)
    if p.size == 0:
        raise InvalidInput("empty p-value list")
    if not 0.0 < alpha < 1.0:
        raise InvalidInput(f"alpha must lie in (0, 1), got {alpha}")
    if np.any((p < 0.0) | (p > 1.0)) or not np.all(np.isfinite(p)):
        raise InvalidInput("p-values must lie in [0, 1]")
    k, cutoff = _bh_threshold(p, alpha)
    if k == 0:
        return []
    return sorted(int(i) for i in np.nonzero(p <= cutoff)[0])


def screen_gene_sets(
    dataset: Dataset,
    sets: GeneSetCollection,
    method: str = "mean",
    tau: float | None = None,
    calibration: str = "normal",
    plan: BootstrapPlan | None = None,
    alpha: float = 0.05,
) -> ScreeningReport:
    """Test each gene set and control the false discovery rate at ``alpha``.

    ``method`` is ``"mean"`` or ``"quantile"`` (the latter requires
    ``tau``); ``calibration`` is ``"normal"`` or ``"bootstrap"``.  With
    bootstrap calibration, set ``k`` uses the multiplier stream derived
    from ``(plan.seed, set k)`` so the full screen is deterministic given
    the plan's seed.
    """
    if method not in ("mean", "quantile"):
        raise InvalidConfig(f"method must be 'mean' or 'quantile', got {method!r}")
    if method == "quantile" and tau is None:
        raise InvalidConfig("quantile screening requires tau")
    if calibration not in ("normal", "bootstrap"):
        raise InvalidConfig(f"unknown calibration {calibration!r}")
    if calibration == "bootstrap" and plan is None:
        plan = BootstrapPlan()
    if not 0.0 < alpha < 1.0:
        raise InvalidInput(f"alpha must lie in (0, 1), got {alpha}")

    results: list[SetResult] = []
    for index, (set_id, columns) in enumerate(sets.sets):
        sub_x = dataset.X[:, columns]
        try:
            if calibration == "bootstrap":
                set_plan = BootstrapPlan(
                    draws=plan.draws,
                    multiplier=plan.multiplier,
                    seed=child_seed(plan.seed, _SET_DOMAIN, index),
                )
                if method == "quantile":
                    res = bootstrap_quantile_test(sub_x, dataset.y, tau, set_plan)
                else:
                    res = bootstrap_mean_test(sub_x, dataset.y, set_plan)
            elif method == "quantile":
                res = quantile_independence_test(sub_x, dataset.y, tau)
            else:
                res = mean_independence_test(sub_x, dataset.y)
        except DegenerateData as exc:
            results.append(
                SetResult(
                    set_id=set_id,
                    columns=tuple(columns),
                    p_value=None,
                    statistic=None,
                    error=str(exc),
                )
            )
            continue
        results.append(
            SetResult(
                set_id=set_id,
                columns=tuple(columns),
                p_value=res.p_value,
                statistic=res.statistic,
            )
        )

    tested = [r for r in results if r.error is None]
    excluded = tuple(r.set_id for r in results if r.error is not None)
    if tested:
        p_tested = np.asarray([r.p_value for r in tested])
        threshold_index, _ = _bh_threshold(p_tested, alpha)
        rejected_local = bh_step_up(p_tested, alpha)
        rejected_ids = tuple(tested[i].set_id for i in rejected_local)
    else:
        rejected_ids = ()
        threshold_index = 0
    return ScreeningReport(
        alpha=alpha,
        method=method if tau is None else f"{method}(tau={tau:g})",
        calibration=calibration,
        results=tuple(results),
        bh_threshold_index=threshold_index,
        rejected_set_ids=rejected_ids,
        excluded_set_ids=excluded,
    )
