"""Gaussian-process regression on a precomputed kernel (analytic posterior)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_triangular

from ..errors import DataError, NotPositiveDefiniteError


@dataclass(frozen=True)
class GprModel:
    cholesky_factor: np.ndarray
    alpha: np.ndarray
    train_targets: np.ndarray
    sigma_reg: float
    jitter: float = 0.0


def fit_gpr(K_train, y, sigma_reg: float = 1e-3, jitter: float | None = None) -> GprModel:
    """Factor ``K + sigma_reg^2 I = L L'`` and solve ``alpha = (K + sigma_reg^2 I)^-1 y``.

    If the factorization fails and ``jitter`` is given, ``jitter * I`` is added
    once before giving up; the amount used is recorded on the model.
    """
    K = np.asarray(getattr(K_train, "values", K_train), dtype=float)
    y = np.asarray(y, dtype=float)
    n = len(y)
    if K.shape != (n, n):
        raise ValueError(f"kernel shape {K.shape} does not match {n} targets")
    if sigma_reg < 0:
        raise ValueError("sigma_reg must be non-negative")
    if not np.all(np.isfinite(y)):
        raise DataError("targets contain non-finite values")
    if np.max(np.abs(K - K.T), initial=0.0) > 1e-8:
        raise ValueError("training kernel is not symmetric")
    A = K + sigma_reg**2 * np.eye(n)
    used = 0.0
    try:
        L = np.linalg.cholesky(A)
    except np.linalg.LinAlgError:
        if not jitter:
            raise NotPositiveDefiniteError(
                "K + sigma_reg^2 I is not positive definite; increase sigma_reg or pass a jitter"
            ) from None
        try:
            L = np.linalg.cholesky(A + jitter * np.eye(n))
            used = float(jitter)
        except np.linalg.LinAlgError:
            raise NotPositiveDefiniteError(
                f"K + sigma_reg^2 I is not positive definite even with jitter {jitter:g}"
            ) from None
    v = solve_triangular(L, y, lower=True)
    alpha = solve_triangular(L.T, v, lower=False)
    return GprModel(L, alpha, y.copy(), float(sigma_reg), used)


def predict_gpr(model: GprModel, K_cross, k_diag_test) -> tuple[np.ndarray, np.ndarray]:
    """Posterior mean and standard deviation (variance clamped at 0)."""
    Ks = np.asarray(getattr(K_cross, "values", K_cross), dtype=float)
    kd = np.asarray(k_diag_test, dtype=float)
    n = len(model.alpha)
    if Ks.ndim != 2 or Ks.shape[1] != n or kd.shape != (Ks.shape[0],):
        raise ValueError(f"shape mismatch: K_cross {Ks.shape}, k_diag {kd.shape}, {n} training points")
    mu = Ks @ model.alpha
    v = solve_triangular(model.cholesky_factor, Ks.T, lower=True)
    var = kd - np.einsum("ij,ij->j", v, v)
    return mu, np.sqrt(np.maximum(var, 0.0))
