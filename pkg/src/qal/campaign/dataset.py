"""Dataset records and the ``id,<features...>,target`` CSV format."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import DataError


@dataclass(frozen=True)
class Dataset:
    """Rows of raw descriptors with one target each; ids are unique strings."""

    ids: tuple
    X: np.ndarray
    y: np.ndarray
    feature_names: tuple = ()
    name: str = "dataset"
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        X = np.asarray(self.X, dtype=float)
        y = np.asarray(self.y, dtype=float)
        ids = tuple(str(i) for i in self.ids)
        if X.ndim != 2 or y.ndim != 1 or len(X) != len(y) or len(ids) != len(y):
            raise DataError("ids, feature rows and targets must have matching lengths")
        if len(ids) < 1 or X.shape[1] < 1:
            raise DataError("dataset needs at least one record and one feature")
        if len(set(ids)) != len(ids):
            dup = next(i for i in ids if ids.count(i) > 1)
            raise DataError(f"duplicate record id {dup!r}")
        if not np.all(np.isfinite(X)) or not np.all(np.isfinite(y)):
            raise DataError("features and targets must be finite")
        names = tuple(self.feature_names) or tuple(f"f{k}" for k in range(X.shape[1]))
        if len(names) != X.shape[1]:
            raise DataError(f"{len(names)} feature names for {X.shape[1]} columns")
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "ids", ids)
        object.__setattr__(self, "feature_names", names)

    def __len__(self) -> int:
        return len(self.ids)

    @property
    def dim(self) -> int:
        return self.X.shape[1]

    def index_of(self, record_id: str) -> int:
        try:
            return self.ids.index(record_id)
        except ValueError:
            raise DataError(f"unknown record id {record_id!r}") from None

    def optimum_index(self, objective: str) -> int:
        """First index attaining the best target (ties to the lower index)."""
        return int(np.argmin(self.y) if objective == "minimize" else np.argmax(self.y))


def read_dataset_csv(path, name: str | None = None) -> Dataset:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise DataError(f"{path}: empty file")
    header = [h.strip() for h in rows[0]]
    if not header or header[0] != "id":
        raise DataError(f"{path}:1: first column must be 'id'")
    if "target" not in header:
        raise DataError(f"{path}:1: missing required column 'target'")
    if header[-1] != "target":
        raise DataError(f"{path}:1: 'target' must be the last column")
    features = header[1:-1]
    if not features:
        raise DataError(f"{path}:1: no feature columns")
    ids, X, y = [], [], []
    for lineno, row in enumerate(rows[1:], 2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != len(header):
            raise DataError(f"{path}:{lineno}: expected {len(header)} fields, got {len(row)}")
        try:
            vals = [float(v) for v in row[1:]]
        except ValueError:
            raise DataError(f"{path}:{lineno}: non-numeric value") from None
        if not all(math.isfinite(v) for v in vals):
            raise DataError(f"{path}:{lineno}: non-finite value")
        ids.append(row[0].strip())
        X.append(vals[:-1])
        y.append(vals[-1])
    if not ids:
        raise DataError(f"{path}: no records")
    return Dataset(tuple(ids), np.array(X), np.array(y), tuple(features), name or str(path))


def write_dataset_csv(ds: Dataset, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["id", *ds.feature_names, "target"])
        for rid, row, t in zip(ds.ids, ds.X, ds.y):
            w.writerow([rid, *(repr(float(v)) for v in row), repr(float(t))])
