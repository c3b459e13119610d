"""Test of conditional quantile independence at a fixed quantile level.

The response enters only through the indicator residuals
``tau - 1{Y_i <= Q^_tau}`` built from the type-1 empirical quantile, so the
statistic is invariant under strictly increasing transforms of the
response.  The studentizer carries no finite-sample factor.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import norm

from .core import (
    _as_matrix,
    _as_vector,
    _offdiag_sum,
    centered_sums,
    half_squared_distance_matrix,
    u_center,
)
from .exceptions import DegenerateData, InvalidData, InvalidQuantile, SampleTooSmall

__all__ = [
    "QuantileTestResult",
    "empirical_quantile",
    "quantile_residuals",
    "quantile_independence_test",
]


@dataclass(frozen=True)
class QuantileTestResult:
    """Outcome of a conditional-quantile-independence test."""

    statistic: float
    p_value: float
    tau: float
    quantile_estimate: float
    n: int
    p: int
    calibration: str = "normal"
    mdd_sum: float = float("nan")
    variance_estimate: float = float("nan")


def empirical_quantile(y, tau: float) -> float:
    """Type-1 empirical quantile: the ``ceil(n tau)``-th order statistic.

    This is the left-continuous inverse ``inf{y : F_n(y) >= tau}``; the
    residual counting identities used by the test depend on this exact
    convention.
    """
    y = _as_vector(y, "y")
    if not 0.0 < tau < 1.0:
        raise InvalidQuantile(f"tau must be in (0, 1), got {tau}")
    if y.size < 1:
        raise InvalidData("empty sample")
    k = math.ceil(y.size * tau)
    return float(np.partition(y, k - 1)[k - 1])


def quantile_residuals(y, tau: float) -> np.ndarray:
    """Indicator residuals ``tau - 1{y_i <= empirical_quantile(y, tau)}``.

    Entries take values in ``{tau, tau - 1}``; with distinct responses
    exactly ``ceil(n tau)`` of them equal ``tau - 1``.
    """
    y = _as_vector(y, "y")
    q = empirical_quantile(y, tau)
    return tau - (y <= q).astype(float)


def _quantile_parts(X, y, tau):
    """Shared computation: (n, p, q_hat, mdd_sum, pair_products, variance)."""
    X = _as_matrix(X, "X")
    y = _as_vector(y, "y")
    n = y.size
    if X.shape[0] != n:
        raise InvalidData(f"X has {X.shape[0]} rows but y has {n} entries")
    if n < 4:
        raise SampleTooSmall(f"test needs n >= 4, got n={n}")
    q_hat = empirical_quantile(y, tau)
    w = tau - (y <= q_hat).astype(float)
    if np.all(w == w[0]):
        raise DegenerateData(
            "indicator residuals are constant (response effectively constant at this level)"
        )
    col_sums = centered_sums(X)
    b_tilde = u_center(half_squared_distance_matrix(w))
    mdd_sum = _offdiag_sum(col_sums * b_tilde) / (n * (n - 3))
    d = col_sums * b_tilde
    np.fill_diagonal(d, 0.0)
    # Plug-in studentizer; deliberately no finite-sample factor here, in
    # contrast with the mean test's variance estimator.
    ss = float((d * d).sum()) / (n * (n - 1))
    if ss == 0.0:
        raise DegenerateData("all covariate columns constant")
    return n, X.shape[1], q_hat, mdd_sum, d, ss


def quantile_independence_test(X, y, tau: float) -> QuantileTestResult:
    """Conditional-quantile-independence test at level ``tau``.

    Runs the studentized MDD sum on the indicator residuals with a normal
    upper-tail p-value.
    """
    n, p, q_hat, mdd_sum, _, ss = _quantile_parts(X, y, tau)
    statistic = math.sqrt(n * (n - 1) / 2.0) * mdd_sum / math.sqrt(ss)
    return QuantileTestResult(
        statistic=statistic,
        p_value=float(norm.sf(statistic)),
        tau=float(tau),
        quantile_estimate=q_hat,
        n=n,
        p=p,
        calibration="normal",
        mdd_sum=mdd_sum,
        variance_estimate=ss,
    )
