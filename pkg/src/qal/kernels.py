"""Classical and quantum kernels, Gram-matrix construction and diagnostics.

The fidelity kernel is the squared overlap ``|<psi(x)|psi(y)>|^2`` (what a
kernel-estimation circuit measures); the projected kernel is a Gaussian over
the per-qubit Bloch vectors ``(tr[X rho_k], tr[Y rho_k], tr[Z rho_k])``.

Gram matrices are assembled block by block. Each block is computed by the
same call whatever the thread count, so serial and threaded construction give
bit-identical results.
"""

from __future__ import annotations

import csv
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .qsim import FeatureMapSpec, bloch_vectors, encode_states

BLOCK = 64


@dataclass
class KernelMatrix:
    values: np.ndarray
    row_ids: list
    col_ids: list
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        self.row_ids = [str(i) for i in self.row_ids]
        self.col_ids = [str(i) for i in self.col_ids]
        if self.values.shape != (len(self.row_ids), len(self.col_ids)):
            raise ValueError(
                f"kernel shape {self.values.shape} does not match ids ({len(self.row_ids)}, {len(self.col_ids)})"
            )

    @property
    def is_square(self) -> bool:
        return self.row_ids == self.col_ids


@dataclass(frozen=True)
class KernelDiagnostics:
    symmetric: bool
    symmetry_dev: float
    min_eigenvalue: float
    diag_max_dev: float


def _as_rows(X) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    if X.ndim != 2:
        raise ValueError("expected a 2-D array of rows")
    if not np.all(np.isfinite(X)):
        raise ValueError("input rows contain non-finite values")
    return X


def _default_ids(n: int, ids) -> list:
    return [str(i) for i in range(n)] if ids is None else list(ids)


def _gram(left: np.ndarray, right: np.ndarray | None, block_fn, threads: int = 1) -> np.ndarray:
    """Evaluate ``block_fn`` on row/column blocks; ``right=None`` means symmetric."""
    symmetric = right is None
    right_ = left if symmetric else right
    n, m = len(left), len(right_)
    out = np.empty((n, m))
    tasks = []
    for i0 in range(0, n, BLOCK):
        for j0 in range(i0 if symmetric else 0, m, BLOCK):
            tasks.append((i0, j0))

    def work(task):
        i0, j0 = task
        out[i0:i0 + BLOCK, j0:j0 + BLOCK] = block_fn(left[i0:i0 + BLOCK], right_[j0:j0 + BLOCK])

    if threads > 1 and len(tasks) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(work, tasks))
    else:
        for t in tasks:
            work(t)
    if symmetric:
        upper = np.triu(out)
        out = upper + np.triu(out, 1).T
    return out


def _sq_dists(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    # explicit differences: exact zeros on identical rows
    diff = A[:, None, :] - B[None, :, :]
    return np.einsum("ijk,ijk->ij", diff, diff)


def rbf_kernel(xi, xj, gamma: float) -> float:
    """``exp(-gamma * ||xi - xj||^2)`` with ``gamma = 1 / (2 l^2)``."""
    xi, xj = np.asarray(xi, dtype=float), np.asarray(xj, dtype=float)
    if xi.shape != xj.shape:
        raise ValueError(f"dimension mismatch: {xi.shape} vs {xj.shape}")
    if not (np.all(np.isfinite(xi)) and np.all(np.isfinite(xj))):
        raise ValueError("non-finite input")
    if not gamma > 0:
        raise ValueError("gamma must be positive")
    d = xi - xj
    return math.exp(-gamma * float(np.dot(d, d)))


def dotproduct_white_kernel(xi, xj, i, j, sigma0_sq: float, noise: float) -> float:
    """``sigma0^2 + xi.xj + noise * [i == j]``."""
    xi, xj = np.asarray(xi, dtype=float), np.asarray(xj, dtype=float)
    if xi.shape != xj.shape:
        raise ValueError(f"dimension mismatch: {xi.shape} vs {xj.shape}")
    if sigma0_sq < 0 or noise < 0:
        raise ValueError("sigma0_sq and noise must be non-negative")
    return sigma0_sq + float(np.dot(xi, xj)) + (noise if i == j else 0.0)


def rbf_matrix(X, Y=None, gamma: float = 1.0, row_ids=None, col_ids=None, threads: int = 1) -> KernelMatrix:
    if not gamma > 0:
        raise ValueError("gamma must be positive")
    X = _as_rows(X)
    Yr = None if Y is None else _as_rows(Y)
    if Yr is not None and Yr.shape[1] != X.shape[1]:
        raise ValueError("dimension mismatch between X and Y")
    values = _gram(X, Yr, lambda a, b: np.exp(-gamma * _sq_dists(a, b)), threads)
    rows = _default_ids(len(X), row_ids)
    cols = rows if Y is None else _default_ids(len(Yr), col_ids)
    return KernelMatrix(values, rows, cols, {"kernel": "rbf", "gamma": gamma})


def dot_white_matrix(
    X, Y=None, sigma0_sq: float = 1.0, noise: float = 0.0, row_ids=None, col_ids=None, threads: int = 1
) -> KernelMatrix:
    """DotProduct + White Gram matrix; the white term only lands on the diagonal of ``k(X, X)``."""
    if sigma0_sq < 0 or noise < 0:
        raise ValueError("sigma0_sq and noise must be non-negative")
    X = _as_rows(X)
    Yr = None if Y is None else _as_rows(Y)
    if Yr is not None and Yr.shape[1] != X.shape[1]:
        raise ValueError("dimension mismatch between X and Y")
    values = _gram(X, Yr, lambda a, b: sigma0_sq + a @ b.T, threads)
    if Y is None:
        values[np.diag_indices_from(values)] += noise
    rows = _default_ids(len(X), row_ids)
    cols = rows if Y is None else _default_ids(len(Yr), col_ids)
    return KernelMatrix(values, rows, cols, {"kernel": "dot_white", "sigma0_sq": sigma0_sq, "noise": noise})


def _fidelity_block(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.abs(a.conj() @ b.T) ** 2


def fqk_matrix(
    spec: FeatureMapSpec, X, Y=None, row_ids=None, col_ids=None, threads: int = 1
) -> KernelMatrix:
    """Fidelity quantum kernel ``|<psi(x_i)|psi(y_j)>|^2``; each row is encoded once."""
    X = _as_rows(X)
    left = encode_states(spec, X)
    right = None if Y is None else encode_states(spec, _as_rows(Y))
    values = _gram(left, right, _fidelity_block, threads)
    rows = _default_ids(len(X), row_ids)
    cols = rows if Y is None else _default_ids(len(right), col_ids)
    prov = {"kernel": "fqk", "feature_map": spec.digest(), "family": spec.family, "reps": spec.reps}
    return KernelMatrix(values, rows, cols, prov)


def pqk_embedding(spec: FeatureMapSpec, X) -> np.ndarray:
    """Flattened Bloch vectors of every qubit: ``(m, 3 * n_qubits)``."""
    states = encode_states(spec, _as_rows(X))
    return bloch_vectors(states).reshape(len(states), -1)


def pqk_matrix(
    spec: FeatureMapSpec, X, pqk_gamma: float = 1.0, Y=None, row_ids=None, col_ids=None, threads: int = 1
) -> KernelMatrix:
    """Projected quantum kernel over one-qubit reduced density matrices."""
    if not pqk_gamma > 0:
        raise ValueError("pqk_gamma must be positive")
    X = _as_rows(X)
    left = pqk_embedding(spec, X)
    right = None if Y is None else pqk_embedding(spec, Y)
    values = _gram(left, right, lambda a, b: np.exp(-pqk_gamma * _sq_dists(a, b)), threads)
    rows = _default_ids(len(X), row_ids)
    cols = rows if Y is None else _default_ids(len(right), col_ids)
    prov = {"kernel": "pqk", "feature_map": spec.digest(), "family": spec.family, "reps": spec.reps,
            "pqk_gamma": pqk_gamma}
    return KernelMatrix(values, rows, cols, prov)


def validate_kernel(K, unit_diagonal: bool | None = None) -> KernelDiagnostics:
    """Symmetry deviation, smallest eigenvalue and max ``|diag - 1|``.

    ``unit_diagonal`` defaults to True for rbf/fqk/pqk provenance; when False
    the diagonal deviation is reported as 0.
    """
    values = K.values if isinstance(K, KernelMatrix) else np.asarray(K, dtype=float)
    if values.ndim != 2 or values.shape[0] != values.shape[1]:
        raise ValueError(f"kernel matrix must be square, got shape {values.shape}")
    if unit_diagonal is None:
        kind = K.provenance.get("kernel") if isinstance(K, KernelMatrix) else None
        unit_diagonal = kind in (None, "rbf", "fqk", "pqk")
    sym_dev = float(np.max(np.abs(values - values.T))) if values.size else 0.0
    if values.size:
        min_eig = float(np.linalg.eigvalsh((values + values.T) / 2).min())
    else:
        min_eig = 0.0
    diag_dev = float(np.max(np.abs(np.diag(values) - 1.0))) if unit_diagonal and values.size else 0.0
    return KernelDiagnostics(sym_dev <= 1e-10, sym_dev, min_eig, diag_dev)


def write_kernel_csv(K: KernelMatrix, path) -> None:
    """Row ids in the first column, header = ``id`` followed by column ids."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["id"] + K.col_ids)
        for rid, row in zip(K.row_ids, K.values):
            w.writerow([rid] + [repr(float(v)) for v in row])


def read_kernel_csv(path) -> KernelMatrix:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ValueError(f"{path}: empty kernel file")
    col_ids = rows[0][1:]
    row_ids, values = [], []
    for lineno, row in enumerate(rows[1:], 2):
        if len(row) != len(col_ids) + 1:
            raise ValueError(f"{path}:{lineno}: expected {len(col_ids) + 1} fields, got {len(row)}")
        row_ids.append(row[0])
        try:
            values.append([float(v) for v in row[1:]])
        except ValueError as exc:
            raise ValueError(f"{path}:{lineno}: {exc}") from None
    values = np.array(values, dtype=float).reshape(len(row_ids), len(col_ids))
    return KernelMatrix(values, row_ids, col_ids, {"kernel": "precomputed", "source": str(path)})
