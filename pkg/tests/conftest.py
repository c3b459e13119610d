import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20260810)


def naive_u_center(d):
    """Entry-by-entry transcription of the centering formula."""
    d = np.asarray(d, dtype=float)
    n = d.shape[0]
    out = np.empty_like(d)
    for i in range(n):
        for j in range(n):
            out[i, j] = (
                d[i, j]
                - d[i, :].sum() / (n - 2)
                - d[:, j].sum() / (n - 2)
                + d.sum() / ((n - 1) * (n - 2))
            )
    return out


def offdiag_inner(a, b):
    total = 0.0
    n = a.shape[0]
    for i in range(n):
        for j in range(n):
            if i != j:
                total += a[i, j] * b[i, j]
    return total
