"""Studentized wild-bootstrap calibration for the mean and quantile tests.

Each draw perturbs the pairwise products ``d_kl`` by i.i.d. mean-zero,
unit-variance multipliers ``e_k e_l``.  After cancellation of the common
normalizing constants the studentized bootstrap statistic reduces to::

    T* = sum_{k<l} d_kl e_k e_l / sqrt(sum_{k<l} d_kl^2 e_k^2 e_l^2)

which is what this module evaluates; the literal two-step form (perturbed
MDD sum over its own variance estimator) is algebraically identical and is
exercised against this one in the test suite.

The bootstrap p-value is the plain fraction of draws with ``T* >= T``; with
few draws a p-value of exactly zero is possible.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from ._streams import substream
from .exceptions import DegenerateData, DegenerateDraw, InvalidConfig, InvalidData
from .mean import MeanTestResult, _mean_parts, finite_sample_factor
from .quantile import QuantileTestResult, _quantile_parts

__all__ = [
    "BootstrapPlan",
    "multiplier_matrix",
    "bootstrap_statistic",
    "bootstrap_mean_test",
    "bootstrap_quantile_test",
]

logger = logging.getLogger(__name__)

_MULTIPLIERS = ("gaussian", "rademacher")
_DRAW_DOMAIN = 3


@dataclass(frozen=True)
class BootstrapPlan:
    """Number of draws, multiplier law, and root seed for one calibration.

    Draw ``b`` always consumes the ``(seed, draw b)`` stream, so results do
    not depend on execution order or thread count.
    """

    draws: int = 500
    multiplier: str = "gaussian"
    seed: int = 0

    def __post_init__(self):
        if self.draws < 1:
            raise InvalidConfig(f"draws must be >= 1, got {self.draws}")
        if self.multiplier not in _MULTIPLIERS:
            raise InvalidConfig(
                f"multiplier must be one of {_MULTIPLIERS}, got {self.multiplier!r}"
            )


def multiplier_matrix(plan: BootstrapPlan, n: int) -> np.ndarray:
    """Multipliers for every draw, shape ``(plan.draws, n)``."""
    out = np.empty((plan.draws, n))
    for b in range(plan.draws):
        rng = substream(plan.seed, _DRAW_DOMAIN, b)
        if plan.multiplier == "gaussian":
            out[b] = rng.standard_normal(n)
        else:
            out[b] = rng.integers(0, 2, n) * 2.0 - 1.0
    return out


def bootstrap_statistic(d, e) -> float:
    """Studentized bootstrap statistic for one multiplier vector.

    ``d`` is the zero-diagonal pairwise product matrix produced by the test
    being calibrated.  Raises :class:`DegenerateDraw` when the denominator
    vanishes (for instance when at most one multiplier is nonzero).
    """
    d = np.asarray(d, dtype=float)
    e = np.asarray(e, dtype=float)
    if d.ndim != 2 or d.shape[0] != d.shape[1]:
        raise InvalidData(f"d must be square, got shape {d.shape}")
    if e.shape != (d.shape[0],):
        raise InvalidData("multiplier vector length must match d")
    if not np.all(np.isfinite(e)):
        raise InvalidData("multipliers contain non-finite entries")
    num, den_sq = _bootstrap_parts(d, e[None, :])
    if den_sq[0] <= 0.0:
        raise DegenerateDraw("zero bootstrap studentizer for this draw")
    return float(num[0] / math.sqrt(den_sq[0]))


def _bootstrap_parts(d: np.ndarray, E: np.ndarray):
    """Vectorized numerators and squared denominators over draws."""
    d0 = d.copy()
    np.fill_diagonal(d0, 0.0)
    num = 0.5 * np.einsum("bi,ij,bj->b", E, d0, E)
    E2 = E * E
    den_sq = 0.5 * np.einsum("bi,ij,bj->b", E2, d0 * d0, E2)
    return num, den_sq


def _bootstrap_p_value(d: np.ndarray, statistic: float, plan: BootstrapPlan) -> float:
    E = multiplier_matrix(plan, d.shape[0])
    num, den_sq = _bootstrap_parts(d, E)
    valid = den_sq > 0.0
    n_bad = int((~valid).sum())
    if n_bad:
        # Degenerate draws count as non-rejections.
        logger.warning("%d of %d bootstrap draws were degenerate", n_bad, plan.draws)
    t_star = np.full(plan.draws, -np.inf)
    t_star[valid] = num[valid] / np.sqrt(den_sq[valid])
    return float(np.count_nonzero(t_star >= statistic)) / plan.draws


def bootstrap_mean_test(X, y, plan: BootstrapPlan) -> MeanTestResult:
    """Marginal conditional-mean-independence test with bootstrap p-value."""
    n, p, mdd_sum, d = _mean_parts(X, y)
    total = float((d * d).sum())
    if total == 0.0:
        raise DegenerateData(
            "degenerate sample: constant response or all covariate columns constant"
        )
    ss = total / (n * (n - 1) * finite_sample_factor(n))
    statistic = math.sqrt(n * (n - 1) / 2.0) * mdd_sum / math.sqrt(ss)
    p_value = _bootstrap_p_value(d, statistic, plan)
    return MeanTestResult(
        statistic=statistic,
        p_value=p_value,
        mdd_sum=mdd_sum,
        variance_estimate=ss,
        n=n,
        p=p,
        calibration="bootstrap",
    )


def bootstrap_quantile_test(X, y, tau: float, plan: BootstrapPlan) -> QuantileTestResult:
    """Conditional-quantile-independence test with bootstrap p-value."""
    n, p, q_hat, mdd_sum, d, ss = _quantile_parts(X, y, tau)
    statistic = math.sqrt(n * (n - 1) / 2.0) * mdd_sum / math.sqrt(ss)
    p_value = _bootstrap_p_value(d, statistic, plan)
    return QuantileTestResult(
        statistic=statistic,
        p_value=p_value,
        tau=float(tau),
        quantile_estimate=q_hat,
        n=n,
        p=p,
        calibration="bootstrap",
        mdd_sum=mdd_sum,
        variance_estimate=ss,
    )
