"""Aggregation of per-cell mean tests over a two-factor design.

Observations are partitioned into an I x J grid of cells with cell-specific
nuisance means.  Each cell contributes its own weighted squared-MDD sum and
its own plug-in variance; the aggregated statistic is the ratio of the
summed numerators to the square root of the summed variances, again with a
normal upper-tail p-value.

The per-cell variance here carries no finite-sample factor, matching the
aggregated statistic's definition; with a single cell the statistic
therefore equals the plain mean test's statistic divided by
``sqrt(c_n)``.  Pass ``cell_adjustment=True`` to divide each cell's
variance by its own factor instead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import norm

from .data import Dataset
from .exceptions import DegenerateData, InvalidData
from .mean import MeanTestResult, _mean_parts, finite_sample_factor

__all__ = ["CellTable", "factorial_mean_test"]


@dataclass
class CellTable:
    """An I x J grid of datasets sharing one covariate dimension."""

    cells: list[list[Dataset]]

    def __post_init__(self):
        if not self.cells or not self.cells[0]:
            raise InvalidData("cell table must contain at least one cell")
        width = len(self.cells[0])
        if any(len(row) != width for row in self.cells):
            raise InvalidData("cell table rows have unequal lengths")
        p = self.cells[0][0].p
        for i, row in enumerate(self.cells):
            for j, cell in enumerate(row):
                if cell.n < 4:
                    raise InvalidData(f"cell ({i}, {j}) has n={cell.n} < 4")
                if cell.p != p:
                    raise InvalidData(
                        f"cell ({i}, {j}) has p={cell.p}, expected {p}"
                    )

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.cells), len(self.cells[0])

    @property
    def p(self) -> int:
        return self.cells[0][0].p

    @classmethod
    def from_labels(cls, y, X, row_labels, col_labels=None) -> "CellTable":
        """Partition observations into cells by one or two label vectors."""
        y = np.asarray(y, dtype=float)
        row_labels = np.asarray(row_labels)
        if col_labels is None:
            col_labels = np.zeros(y.size, dtype=int)
        col_labels = np.asarray(col_labels)
        row_values = sorted(set(row_labels.tolist()))
        col_values = sorted(set(col_labels.tolist()))
        grid = []
        for rv in row_values:
            row = []
            for cv in col_values:
                mask = (row_labels == rv) & (col_labels == cv)
                if int(mask.sum()) < 4:
                    raise InvalidData(
                        f"cell ({rv!r}, {cv!r}) has {int(mask.sum())} observations, need >= 4"
                    )
                row.append(Dataset(y=y[mask], X=np.asarray(X, dtype=float)[mask]))
            grid.append(row)
        return cls(cells=grid)


def factorial_mean_test(table: CellTable, cell_adjustment: bool = False) -> MeanTestResult:
    """Aggregated conditional-mean-independence test over all cells.

    The statistic is ``sum_ij sqrt(C(n_ij, 2)) * (per-cell MDD sum)`` over
    ``sqrt(sum_ij (per-cell variance))``; cell order does not matter.
    A degenerate cell (constant response or all-constant covariates) aborts
    the test, naming the offending cell.
    """
    numerator = 0.0
    variance_total = 0.0
    total_n = 0
    for i, row in enumerate(table.cells):
        for j, cell in enumerate(row):
            n, _, mdd_sum, d = _mean_parts(cell.X, cell.y)
            total = float((d * d).sum())
            if total == 0.0:
                raise DegenerateData(
                    f"cell ({i}, {j}) is degenerate: constant response or "
                    "all covariate columns constant"
                )
            ss = total / (n * (n - 1))
            if cell_adjustment:
                ss /= finite_sample_factor(n)
            numerator += math.sqrt(n * (n - 1) / 2.0) * mdd_sum
            variance_total += ss
            total_n += n
    statistic = numerator / math.sqrt(variance_total)
    return MeanTestResult(
        statistic=statistic,
        p_value=float(norm.sf(statistic)),
        mdd_sum=numerator,
        variance_estimate=variance_total,
        n=total_n,
        p=table.p,
        calibration="normal",
    )
