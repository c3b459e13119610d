"""Dataset container and tabular input/output.

Datasets are plain numpy arrays bundled with optional column names.  Files
are delimited text with a mandatory header row; all cells must be numeric.
Gene-set collections are tab-separated: one set per line, an identifier
followed by a comma-separated list of covariate column names.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .exceptions import DuplicateSetId, InvalidData, ParseError

__all__ = [
    "Dataset",
    "GeneSetCollection",
    "read_dataset",
    "write_dataset",
    "read_gene_sets",
]


@dataclass
class Dataset:
    """Response vector ``y`` (length n) with covariate matrix ``X`` (n x p)."""

    y: np.ndarray
    X: np.ndarray
    column_names: list[str] | None = None

    def __post_init__(self):
        self.y = np.asarray(self.y, dtype=float)
        self.X = np.asarray(self.X, dtype=float)
        if self.X.ndim == 1:
            self.X = self.X[:, None]
        if self.y.ndim != 1:
            raise InvalidData(f"y must be one-dimensional, got shape {self.y.shape}")
        if self.X.ndim != 2:
            raise InvalidData(f"X must be a matrix, got shape {self.X.shape}")
        if self.X.shape[0] != self.y.size:
            raise InvalidData(
                f"X has {self.X.shape[0]} rows but y has {self.y.size} entries"
            )
        if self.y.size < 4:
            raise InvalidData(f"need at least 4 observations, got {self.y.size}")
        if self.X.shape[1] < 1:
            raise InvalidData("X must have at least one column")
        if not (np.all(np.isfinite(self.y)) and np.all(np.isfinite(self.X))):
            raise InvalidData("dataset contains non-finite entries")
        if self.column_names is not None and len(self.column_names) != self.X.shape[1]:
            raise InvalidData(
                f"{len(self.column_names)} column names for {self.X.shape[1]} columns"
            )

    @property
    def n(self) -> int:
        return self.y.size

    @property
    def p(self) -> int:
        return self.X.shape[1]


@dataclass
class GeneSetCollection:
    """Named groups of covariate columns, stored as resolved index lists."""

    sets: list[tuple[str, list[int]]] = field(default_factory=list)

    def __post_init__(self):
        seen = set()
        for set_id, cols in self.sets:
            if set_id in seen:
                raise DuplicateSetId(f"duplicate set id {set_id!r}")
            seen.add(set_id)
            if not cols:
                raise InvalidData(f"gene set {set_id!r} is empty")

    def __len__(self) -> int:
        return len(self.sets)


def read_dataset(path, response, delimiter: str = ",") -> Dataset:
    """Load a delimited text file with a header row into a :class:`Dataset`.

    ``response`` selects the response column by header name or 0-based
    integer index; the remaining columns become ``X`` in file order.
    Non-numeric cells raise :class:`ParseError` carrying the 1-based data
    row and the column name.
    """
    with open(path, newline="") as handle:
        reader = csv.reader(handle, delimiter=delimiter)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError(f"{path}: empty file") from None
        header = [h.strip() for h in header]
        if isinstance(response, int):
            if not 0 <= response < len(header):
                raise ParseError(
                    f"{path}: response index {response} out of range for "
                    f"{len(header)} columns"
                )
            response_idx = response
        else:
            try:
                response_idx = header.index(response)
            except ValueError:
                raise ParseError(
                    f"{path}: response column {response!r} not found in header"
                ) from None
        rows = []
        for row_num, row in enumerate(reader, start=1):
            if not row:
                continue
            if len(row) != len(header):
                raise ParseError(
                    f"{path}: row {row_num} has {len(row)} cells, expected {len(header)}",
                    row=row_num,
                )
            parsed = []
            for col_idx, cell in enumerate(row):
                try:
                    parsed.append(float(cell))
                except ValueError:
                    raise ParseError(
                        f"{path}: non-numeric cell {cell!r} at row {row_num}, "
                        f"column {header[col_idx]!r}",
                        row=row_num,
                        column=header[col_idx],
                    ) from None
            rows.append(parsed)
    if not rows:
        raise ParseError(f"{path}: no data rows")
    table = np.asarray(rows, dtype=float)
    y = table[:, response_idx]
    X = np.delete(table, response_idx, axis=1)
    names = [h for i, h in enumerate(header) if i != response_idx]
    return Dataset(y=y, X=X, column_names=names)


def write_dataset(path, dataset: Dataset, response_name: str = "y", delimiter: str = ",") -> None:
    """Write a dataset with full double precision (round-trips exactly)."""
    names = dataset.column_names or [f"x{j + 1}" for j in range(dataset.p)]
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle, delimiter=delimiter)
        writer.writerow([response_name, *names])
        for i in range(dataset.n):
            writer.writerow(
                [repr(float(dataset.y[i])), *(repr(float(v)) for v in dataset.X[i])]
            )


def read_gene_sets(path, dataset: Dataset) -> GeneSetCollection:
    """Load a tab-separated gene-set file, resolving column names to indices.

    Each line is ``set_id<TAB>name1,name2,...``; every referenced name must
    exist among the dataset's covariate columns.
    """
    if dataset.column_names is None:
        raise InvalidData("dataset has no column names to resolve gene sets against")
    index_of = {name: j for j, name in enumerate(dataset.column_names)}
    sets: list[tuple[str, list[int]]] = []
    with open(path, newline="") as handle:
        for line_num, line in enumerate(handle, start=1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise ParseError(
                    f"{path}: line {line_num} must be 'set_id<TAB>col,col,...'",
                    row=line_num,
                )
            set_id, cols_field = parts[0].strip(), parts[1]
            indices = []
            for name in cols_field.split(","):
                name = name.strip()
                if name not in index_of:
                    raise ParseError(
                        f"{path}: set {set_id!r} references unknown column {name!r}",
                        row=line_num,
                        column=name,
                    )
                indices.append(index_of[name])
            sets.append((set_id, indices))
    return GeneSetCollection(sets=sets)
