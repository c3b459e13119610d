"""Distance matrices, U-centering, and unbiased dependence estimators.

Everything downstream (mean tests, quantile tests, bootstrap calibration,
factorial aggregation) is assembled from the pieces in this module:

* pairwise distance matrices for scalar and vector samples,
* the U-centering transform whose inner product gives exactly unbiased
  estimators of squared martingale difference divergence (MDD) and squared
  distance covariance,
* slow brute-force oracles used to validate the fast paths.

The squared-MDD estimator is signed: it is unbiased for a nonnegative
population quantity and therefore can be negative in finite samples.  No
truncation is applied anywhere; the test statistics are built from the
signed values.
"""

from __future__ import annotations

import itertools
import math

import numpy as np
from scipy.spatial.distance import cdist

from .exceptions import InvalidData, OracleRangeExceeded, SampleTooSmall

__all__ = [
    "abs_distance_matrix",
    "euclidean_distance_matrix",
    "half_squared_distance_matrix",
    "u_center",
    "ucentered_inner",
    "mdd_unbiased",
    "mdd_kernel_oracle",
    "dcov_unbiased",
    "centered_sums",
]


def _as_vector(v, name: str) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    if v.ndim != 1:
        raise InvalidData(f"{name} must be one-dimensional, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise InvalidData(f"{name} contains non-finite entries")
    return v


def _as_matrix(m, name: str) -> np.ndarray:
    m = np.asarray(m, dtype=float)
    if m.ndim == 1:
        m = m[:, None]
    if m.ndim != 2:
        raise InvalidData(f"{name} must be a matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise InvalidData(f"{name} contains non-finite entries")
    return m


def abs_distance_matrix(v) -> np.ndarray:
    """Pairwise absolute differences ``|v_k - v_l|`` of a scalar sample.

    Parameters
    ----------
    v : array_like, shape (n,)
        Sample of a scalar variable, ``n >= 2``, finite.

    Returns
    -------
    (n, n) ndarray
        Symmetric, zero-diagonal, nonnegative.
    """
    v = _as_vector(v, "v")
    if v.size < 2:
        raise SampleTooSmall("need at least 2 observations for a distance matrix")
    return np.abs(v[:, None] - v[None, :])


def euclidean_distance_matrix(m) -> np.ndarray:
    """Pairwise Euclidean distances between the rows of ``m``.

    For a single column this agrees exactly (bitwise) with
    :func:`abs_distance_matrix` on that column.
    """
    m = _as_matrix(m, "m")
    if m.shape[0] < 2:
        raise SampleTooSmall("need at least 2 observations for a distance matrix")
    return cdist(m, m)


def half_squared_distance_matrix(y) -> np.ndarray:
    """Half squared differences ``(y_i - y_j)^2 / 2`` of the response sample."""
    y = _as_vector(y, "y")
    if y.size < 2:
        raise SampleTooSmall("need at least 2 observations for a distance matrix")
    diff = y[:, None] - y[None, :]
    return 0.5 * diff * diff


def u_center(d) -> np.ndarray:
    """U-center a zero-diagonal symmetric distance matrix.

    Entry ``(i, j)`` of the result is::

        d[i, j] - row_i/(n-2) - col_j/(n-2) + grand/((n-1)(n-2))

    with ``row``/``col``/``grand`` the plain sums of ``d``.  The diagonal is
    stored as the formula produces it but is excluded from every inner
    product taken by this package; with a zero-diagonal input, each row sum
    excluding the diagonal is exactly zero.

    Requires ``n >= 4`` so the inner-product estimators built on top of the
    result have positive denominators.
    """
    d = np.asarray(d, dtype=float)
    if d.ndim != 2 or d.shape[0] != d.shape[1]:
        raise InvalidData(f"expected a square matrix, got shape {d.shape}")
    if not np.all(np.isfinite(d)):
        raise InvalidData("distance matrix contains non-finite entries")
    n = d.shape[0]
    if n < 4:
        raise SampleTooSmall(f"U-centering needs n >= 4, got n={n}")
    row = d.sum(axis=1, keepdims=True)
    col = d.sum(axis=0, keepdims=True)
    grand = float(row.sum())
    return d - row / (n - 2) - col / (n - 2) + grand / ((n - 1) * (n - 2))


def ucentered_inner(a, b) -> float:
    """Inner product ``sum_{i != j} a_ij b_ij / (n (n-3))`` of U-centered matrices.

    The diagonals are never read.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape or a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise InvalidData("inner product needs two square matrices of equal shape")
    n = a.shape[0]
    if n < 4:
        raise SampleTooSmall(f"inner product needs n >= 4, got n={n}")
    total = float((a * b).sum()) - float((np.diagonal(a) * np.diagonal(b)).sum())
    return total / (n * (n - 3))


def _offdiag_sum(m: np.ndarray) -> float:
    return float(m.sum()) - float(np.trace(m))


def mdd_unbiased(x, y, method: str = "ucentered") -> float:
    """Unbiased estimator of the squared MDD of ``y`` given ``x``.

    Zero population MDD is equivalent to conditional mean independence of
    the response from the covariate block, which is what makes this the
    building block of every test in the package.

    Parameters
    ----------
    x : array_like, shape (n,) or (n, q)
        Covariate sample; distances between rows are Euclidean.
    y : array_like, shape (n,)
        Scalar response sample.
    method : {"ucentered", "trace"}
        ``"ucentered"`` forms both U-centered matrices and takes their inner
        product.  ``"trace"`` evaluates the algebraically identical
        closed form ``(tr(AB) + 1'A1 1'B1/((n-1)(n-2)) - 2 1'AB1/(n-2))
        / (n(n-3))`` on the raw distance matrices.  The two paths agree to
        1e-10 relative and exist to cross-check one another.

    Returns
    -------
    float
        Signed estimate; negative values are legitimate finite-sample
        outcomes of the unbiased estimator.
    """
    x = _as_matrix(x, "x")
    y = _as_vector(y, "y")
    n = y.size
    if x.shape[0] != n:
        raise InvalidData(f"x has {x.shape[0]} rows but y has {n} entries")
    if n < 4:
        raise SampleTooSmall(f"mdd_unbiased needs n >= 4, got n={n}")
    a = euclidean_distance_matrix(x)
    b = half_squared_distance_matrix(y)
    if method == "ucentered":
        return ucentered_inner(u_center(a), u_center(b))
    if method == "trace":
        trace_ab = float((a * b).sum())
        grand_a = float(a.sum())
        grand_b = float(b.sum())
        # 1'AB1 without BLAS: row sums of A against column sums of B.
        one_ab_one = float((a.sum(axis=0) * b.sum(axis=1)).sum())
        total = (
            trace_ab
            + grand_a * grand_b / ((n - 1) * (n - 2))
            - 2.0 * one_ab_one / (n - 2)
        )
        return total / (n * (n - 3))
    raise InvalidData(f"unknown method {method!r}")


# The 4-point kernel sums over every split of the quadruple into two pairs
# and over every ordered triple drawn from it.
_PAIR_SPLITS = [
    ((0, 1), (2, 3)),
    ((0, 2), (1, 3)),
    ((0, 3), (1, 2)),
    ((1, 2), (0, 3)),
    ((1, 3), (0, 2)),
    ((2, 3), (0, 1)),
]
_ORDERED_TRIPLES = list(itertools.permutations(range(4), 3))


def mdd_kernel_oracle(x, y) -> float:
    """Brute-force squared-MDD estimate via the fourth-order U-statistic kernel.

    Averages the symmetric kernel

    ``h = (1/6) sum_{s<t, u<v} (A_st B_uv + A_st B_st)
    - (1/12) sum_(s,t,u) A_st B_su``

    over all quadruples of observations.  Cost grows as ``n^4``; calls
    outside ``4 <= n <= 12`` are refused so the kernel sum stays near 1e5
    evaluations.  Used only to validate :func:`mdd_unbiased`.
    """
    x = _as_matrix(x, "x")
    y = _as_vector(y, "y")
    n = y.size
    if x.shape[0] != n:
        raise InvalidData(f"x has {x.shape[0]} rows but y has {n} entries")
    if not 4 <= n <= 12:
        raise OracleRangeExceeded(f"kernel oracle supports 4 <= n <= 12, got n={n}")
    a = euclidean_distance_matrix(x)
    b = half_squared_distance_matrix(y)
    total = 0.0
    for quad in itertools.combinations(range(n), 4):
        pair_part = 0.0
        for (s, t), (u, v) in _PAIR_SPLITS:
            a_st = a[quad[s], quad[t]]
            pair_part += a_st * (b[quad[u], quad[v]] + b[quad[s], quad[t]])
        triple_part = 0.0
        for s, t, u in _ORDERED_TRIPLES:
            triple_part += a[quad[s], quad[t]] * b[quad[s], quad[u]]
        total += pair_part / 6.0 - triple_part / 12.0
    return total / math.comb(n, 4)


def dcov_unbiased(u, v) -> float:
    """Unbiased estimator of the squared distance covariance of two scalars.

    Inner product of the U-centered absolute-distance matrices of ``u`` and
    ``v``; like the MDD estimator it is signed in finite samples.
    """
    u = _as_vector(u, "u")
    v = _as_vector(v, "v")
    if u.size != v.size:
        raise InvalidData("u and v must have equal length")
    if u.size < 4:
        raise SampleTooSmall(f"dcov_unbiased needs n >= 4, got n={u.size}")
    a = u_center(abs_distance_matrix(u))
    b = u_center(abs_distance_matrix(v))
    return ucentered_inner(a, b)


def centered_sums(X, max_block_bytes: int = 1 << 26) -> np.ndarray:
    """Sum over columns of the U-centered per-column distance matrices.

    Returns the ``(n, n)`` matrix with entries ``sum_j A~_kl(j)`` where
    ``A~(j)`` is the U-centered absolute-distance matrix of column ``j``.
    U-centering is linear, so the raw distance matrices are accumulated in
    column blocks (never more than ``max_block_bytes`` of scratch at once)
    and centered a single time; the per-column matrices are never held
    simultaneously.

    This is the shared precomputation behind the studentized test
    statistics and the wild bootstrap.
    """
    X = _as_matrix(X, "X")
    n, p = X.shape
    if n < 4:
        raise SampleTooSmall(f"centered_sums needs n >= 4, got n={n}")
    block = max(1, int(max_block_bytes // (8 * n * n)))
    raw = np.zeros((n, n))
    for start in range(0, p, block):
        chunk = X[:, start : start + block]
        raw += np.abs(chunk[:, None, :] - chunk[None, :, :]).sum(axis=2)
    return u_center(raw)
