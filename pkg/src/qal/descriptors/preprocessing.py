"""Standard scaling and PCA, fit on one set of rows and applied to others."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import DataError

STD_FLOOR = 1e-12


def _rows(X, name="rows") -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[None, :]
    if X.ndim != 2 or X.shape[0] < 1 or X.shape[1] < 1:
        raise DataError(f"{name} must be a non-empty 2-D array")
    if not np.all(np.isfinite(X)):
        raise DataError(f"{name} contain non-finite values")
    return X


@dataclass(frozen=True)
class ScalerState:
    mean: np.ndarray
    std: np.ndarray

    def transform(self, X) -> np.ndarray:
        X = _rows(X)
        if X.shape[1] != self.mean.size:
            raise DataError(f"expected {self.mean.size} features, got {X.shape[1]}")
        safe = np.where(self.std >= STD_FLOOR, self.std, 1.0)
        return np.where(self.std >= STD_FLOOR, (X - self.mean) / safe, 0.0)


def standard_scale(X) -> ScalerState:
    """Per-column mean and population std; near-constant columns transform to 0."""
    X = _rows(X)
    return ScalerState(X.mean(axis=0), X.std(axis=0))


def scale_transform(state: ScalerState, X) -> np.ndarray:
    return state.transform(X)


@dataclass(frozen=True)
class PcaState:
    mean: np.ndarray
    components: np.ndarray  # (n_components, n_features), orthonormal rows
    explained_variance: np.ndarray
    total_variance: float = 1.0

    @property
    def n_components(self) -> int:
        return self.components.shape[0]

    @property
    def explained_variance_ratio(self) -> np.ndarray:
        return self.explained_variance / self.total_variance

    def transform(self, X) -> np.ndarray:
        X = _rows(X)
        if X.shape[1] != self.mean.size:
            raise DataError(f"expected {self.mean.size} features, got {X.shape[1]}")
        return (X - self.mean) @ self.components.T

    def inverse_transform(self, Z) -> np.ndarray:
        return np.asarray(Z, dtype=float) @ self.components + self.mean


def pca_fit(X, n_components: int) -> PcaState:
    """Eigen-decomposition of the sample covariance, components by descending variance.

    Each component's first entry with magnitude above 1e-12 is made positive.
    """
    X = _rows(X)
    n, d = X.shape
    if n_components < 1:
        raise ValueError("n_components must be >= 1")
    if n_components > min(n - 1, d):
        raise ValueError(f"n_components={n_components} exceeds min(n_rows-1, n_features)={min(n - 1, d)}")
    mean = X.mean(axis=0)
    Xc = X - mean
    if not np.any(np.abs(Xc) > 0):
        raise DataError("all rows are identical; PCA is undefined")
    cov = Xc.T @ Xc / (n - 1)
    evals, evecs = np.linalg.eigh(cov)
    order = np.argsort(-evals, kind="stable")[:n_components]
    comps = evecs[:, order].T.copy()
    for row in comps:
        lead = row[np.flatnonzero(np.abs(row) > 1e-12)[0]]
        if lead < 0:
            row *= -1.0
    variances = np.clip(evals[order], 0.0, None)
    return PcaState(mean, comps, variances, float(max(np.trace(cov), np.finfo(float).tiny)))


def pca_transform(state: PcaState, X) -> np.ndarray:
    return state.transform(X)
