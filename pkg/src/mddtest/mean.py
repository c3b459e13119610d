"""Simultaneous tests of conditional mean independence in high dimension.

The marginal test aggregates the unbiased squared-MDD estimates of the
response against every covariate column and studentizes the sum; under the
null of marginal conditional mean independence the statistic is
asymptotically standard normal, and the test rejects in the upper tail.
A joint variant replaces the per-column aggregation with a single MDD of
the response against the whole covariate block.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.stats import norm

from .core import (
    _as_matrix,
    _as_vector,
    _offdiag_sum,
    euclidean_distance_matrix,
    centered_sums,
    half_squared_distance_matrix,
    u_center,
)
from .exceptions import DegenerateData, InvalidData, OracleRangeExceeded, SampleTooSmall

__all__ = [
    "MeanTestResult",
    "finite_sample_factor",
    "variance_estimate",
    "mean_independence_test",
    "joint_mdd_test",
    "unbiased_variance_oracle",
]


@dataclass(frozen=True)
class MeanTestResult:
    """Outcome of a conditional-mean-independence test.

    ``mdd_sum`` is the raw numerator (sum of per-column squared-MDD
    estimates, or the single joint estimate), ``variance_estimate`` the
    squared studentizer, and ``calibration`` records how the p-value was
    obtained (``"normal"`` upper tail or ``"bootstrap"``).
    """

    statistic: float
    p_value: float
    mdd_sum: float
    variance_estimate: float
    n: int
    p: int
    calibration: str = "normal"


def finite_sample_factor(n: int) -> float:
    """Finite-sample adjustment factor for the variance estimator.

    Strictly inside (0, 1), increasing, and tending to one; dividing the
    plug-in variance estimator by this factor removes the leading
    finite-sample bias introduced by U-centering.
    """
    if n < 4:
        raise SampleTooSmall(f"finite_sample_factor needs n >= 4, got n={n}")
    nf = float(n)
    lead = (nf - 3.0) ** 4 / (nf - 1.0) ** 4
    return (
        lead
        + 2.0 * (nf - 3.0) ** 4 / ((nf - 1.0) ** 4 * (nf - 2.0) ** 3)
        + 2.0 * (nf - 3.0) / ((nf - 1.0) ** 4 * (nf - 2.0) ** 3)
    )


def _mean_parts(X, y):
    """Shared computation: returns (n, p, mdd_sum, pair_products).

    ``pair_products`` is the zero-diagonal matrix ``d_kl = (sum_j A~_kl(j))
    B~_kl`` whose off-diagonal square sum drives both the variance
    estimator and the wild bootstrap.
    """
    X = _as_matrix(X, "X")
    y = _as_vector(y, "y")
    n = y.size
    if X.shape[0] != n:
        raise InvalidData(f"X has {X.shape[0]} rows but y has {n} entries")
    if n < 4:
        raise SampleTooSmall(f"test needs n >= 4, got n={n}")
    col_sums = centered_sums(X)
    b_tilde = u_center(half_squared_distance_matrix(y))
    d = col_sums * b_tilde
    np.fill_diagonal(d, 0.0)
    mdd_sum = _offdiag_sum(col_sums * b_tilde) / (n * (n - 3))
    return n, X.shape[1], mdd_sum, d


def variance_estimate(X, y) -> float:
    """Adjusted plug-in estimator of the statistic's null variance.

    ``2 / (n (n-1) c_n) * sum_{k<l} d_kl^2`` with ``c_n`` the finite-sample
    factor.  Strictly positive on non-degenerate data; a zero value means
    the response or every covariate column is constant and is reported as
    :class:`DegenerateData`.
    """
    n, _, _, d = _mean_parts(X, y)
    total = float((d * d).sum())  # d has zero diagonal
    if total == 0.0:
        raise DegenerateData(
            "variance estimate is zero: constant response or all covariate columns constant"
        )
    return total / (n * (n - 1) * finite_sample_factor(n))


def mean_independence_test(X, y) -> MeanTestResult:
    """Marginal conditional-mean-independence test with normal calibration.

    The statistic is ``sqrt(C(n,2))`` times the aggregated squared-MDD sum
    divided by the adjusted studentizer; the p-value is the upper-tail
    standard normal probability.
    """
    n, p, mdd_sum, d = _mean_parts(X, y)
    total = float((d * d).sum())
    if total == 0.0:
        raise DegenerateData(
            "degenerate sample: constant response or all covariate columns constant"
        )
    ss = total / (n * (n - 1) * finite_sample_factor(n))
    statistic = math.sqrt(n * (n - 1) / 2.0) * mdd_sum / math.sqrt(ss)
    return MeanTestResult(
        statistic=statistic,
        p_value=float(norm.sf(statistic)),
        mdd_sum=mdd_sum,
        variance_estimate=ss,
        n=n,
        p=p,
        calibration="normal",
    )


def joint_mdd_test(X, y) -> MeanTestResult:
    """Global conditional-mean-independence test on the whole covariate block.

    Uses the single squared-MDD estimate with Euclidean distances on full
    covariate rows, studentized by the natural plug-in
    ``eta^2 = (1/C(n,2)) sum_{k<l} A~_kl^2 B~_kl^2`` (no finite-sample
    factor; at ``p = 1`` the marginal statistic equals this one times
    ``sqrt(c_n)``).  For large ``p`` the statistic behaves like an
    aggregate of pairwise covariances, so the marginal test is the more
    sensitive default against componentwise nonlinearity.
    """
    X = _as_matrix(X, "X")
    y = _as_vector(y, "y")
    n = y.size
    if X.shape[0] != n:
        raise InvalidData(f"X has {X.shape[0]} rows but y has {n} entries")
    if n < 4:
        raise SampleTooSmall(f"test needs n >= 4, got n={n}")
    a_tilde = u_center(euclidean_distance_matrix(X))
    b_tilde = u_center(half_squared_distance_matrix(y))
    mdd_joint = _offdiag_sum(a_tilde * b_tilde) / (n * (n - 3))
    d = a_tilde * b_tilde
    np.fill_diagonal(d, 0.0)
    eta_sq = float((d * d).sum()) / (n * (n - 1))
    if eta_sq == 0.0:
        raise DegenerateData(
            "degenerate sample: constant response or constant covariate rows"
        )
    statistic = math.sqrt(n * (n - 1) / 2.0) * mdd_joint / math.sqrt(eta_sq)
    return MeanTestResult(
        statistic=statistic,
        p_value=float(norm.sf(statistic)),
        mdd_sum=mdd_joint,
        variance_estimate=eta_sq,
        n=n,
        p=X.shape[1],
        calibration="normal",
    )


@lru_cache(maxsize=2)
def _ordered_eight_tuples(pool: int) -> np.ndarray:
    """All ordered 8-tuples of distinct indices from ``range(pool)``."""
    return np.asarray(
        list(itertools.permutations(range(pool), 8)), dtype=np.intp
    )


def unbiased_variance_oracle(X, y) -> float:
    """Exactly unbiased but combinatorially expensive variance estimator.

    Averages, over all ordered 10-tuples of distinct observations, the
    product of two column-summed fourth-point distance contrasts

    ``a(x1, x2, x3, x4) = |x1-x2| - |x1-x3| - |x2-x4| + |x3-x4|``

    (evaluated on tuple slots 1-4 and 1-2,5-6) with two response contrasts

    ``b(y1, y2, y3, y4) = (y1-y3)(y2-y4)``

    (slots 1-2,7-8 and 1-2,9-10).  The double sum over column pairs
    factorizes through the per-pair column sums of ``a``, which is what
    makes the enumeration tractable.  Restricted to ``10 <= n <= 11``;
    used as a cross-check oracle for :func:`variance_estimate`.
    """
    X = _as_matrix(X, "X")
    y = _as_vector(y, "y")
    n = y.size
    if X.shape[0] != n:
        raise InvalidData(f"X has {X.shape[0]} rows but y has {n} entries")
    if not 10 <= n <= 11:
        raise OracleRangeExceeded(
            f"variance oracle supports 10 <= n <= 11, got n={n}"
        )
    # sum_abs[u, v] = sum_j |x_uj - x_vj|; every a-contrast column sum is a
    # four-term combination of its entries.
    sum_abs = np.abs(X[:, None, :] - X[None, :, :]).sum(axis=2)
    tuples = _ordered_eight_tuples(n - 2)
    t0, t1, t2, t3, t4, t5, t6, t7 = (tuples[:, i] for i in range(8))
    total = 0.0
    indices = np.arange(n)
    # The ordered-tuple total is invariant under swapping the two lead
    # observations, so enumerate unordered pairs and double.
    for k in range(n):
        for l in range(k + 1, n):
            rest = np.concatenate([indices[:k], indices[k + 1 : l], indices[l + 1 :]])
            pair_contrast = (
                sum_abs[k, l]
                - sum_abs[k, rest][:, None]
                - sum_abs[l, rest][None, :]
                + sum_abs[np.ix_(rest, rest)]
            )
            resp_k = y[k] - y[rest]
            resp_l = y[l] - y[rest]
            vals = (
                pair_contrast[t0, t1]
                * pair_contrast[t2, t3]
                * resp_k[t4]
                * resp_l[t5]
                * resp_k[t6]
                * resp_l[t7]
            )
            total += 2.0 * float(vals.sum())
    ordered_10 = math.perm(n, 10)
    return total / ordered_10
