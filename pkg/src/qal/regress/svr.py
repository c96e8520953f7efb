"""epsilon-SVR on a precomputed kernel, solved by SMO.

The dual is written over ``2n`` variables ``beta = (alpha, alpha*)`` with labels
``s = (+1, ..., -1, ...)``::

    min  1/2 beta' Q beta + p' beta
    s.t. s' beta = 0,   0 <= beta <= C

where ``Q_tu = s_t s_u K[t mod n, u mod n]`` and ``p = (eps - y, eps + y)``.
Working pairs are the maximal KKT violators; the two-variable subproblem is
solved analytically and clipped to the box.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numba
import numpy as np

from ..errors import ConvergenceError, DataError

_TAU = 1e-12


@numba.njit(cache=True, nogil=True)
def _smo(K, y, C, eps, tol, max_iter):
    n = K.shape[0]
    l2 = 2 * n
    beta = np.zeros(l2)
    s = np.empty(l2)
    G = np.empty(l2)
    for t in range(n):
        s[t] = 1.0
        s[t + n] = -1.0
        G[t] = eps - y[t]
        G[t + n] = eps + y[t]
    gap = np.inf
    it = 0
    while it < max_iter:
        # maximal violating pair
        gmax = -np.inf
        gmin = np.inf
        i = -1
        j = -1
        for t in range(l2):
            v = -s[t] * G[t]
            up = (s[t] > 0 and beta[t] < C) or (s[t] < 0 and beta[t] > 0)
            low = (s[t] > 0 and beta[t] > 0) or (s[t] < 0 and beta[t] < C)
            if up and v > gmax:
                gmax = v
                i = t
            if low and v < gmin:
                gmin = v
                j = t
        gap = gmax - gmin
        if i < 0 or j < 0 or gap < tol:
            break
        it += 1
        ii = i % n
        jj = j % n
        Qij = s[i] * s[j] * K[ii, jj]
        Qii = K[ii, ii]
        Qjj = K[jj, jj]
        old_i = beta[i]
        old_j = beta[j]
        if s[i] != s[j]:
            quad = Qii + Qjj + 2.0 * Qij
            if quad <= 0:
                quad = _TAU
            delta = (-G[i] - G[j]) / quad
            diff = beta[i] - beta[j]
            beta[i] += delta
            beta[j] += delta
            if diff > 0:
                if beta[j] < 0:
                    beta[j] = 0.0
                    beta[i] = diff
            else:
                if beta[i] < 0:
                    beta[i] = 0.0
                    beta[j] = -diff
            if diff > 0:
                if beta[i] > C:
                    beta[i] = C
                    beta[j] = C - diff
            else:
                if beta[j] > C:
                    beta[j] = C
                    beta[i] = C + diff
        else:
            quad = Qii + Qjj - 2.0 * Qij
            if quad <= 0:
                quad = _TAU
            delta = (G[i] - G[j]) / quad
            total = beta[i] + beta[j]
            beta[i] -= delta
            beta[j] += delta
            if total > C:
                if beta[i] > C:
                    beta[i] = C
                    beta[j] = total - C
            else:
                if beta[j] < 0:
                    beta[j] = 0.0
                    beta[i] = total
            if total > C:
                if beta[j] > C:
                    beta[j] = C
                    beta[i] = total - C
            else:
                if beta[i] < 0:
                    beta[i] = 0.0
                    beta[j] = total
        di = beta[i] - old_i
        dj = beta[j] - old_j
        for t in range(l2):
            kt = t % n
            G[t] += s[t] * (s[i] * K[kt, ii] * di + s[j] * K[kt, jj] * dj)
    # bias (LIBSVM rho) from free variables, else the midpoint of the feasible range
    ub = np.inf
    lb = -np.inf
    nfree = 0
    sfree = 0.0
    for t in range(l2):
        yG = s[t] * G[t]
        if beta[t] >= C:
            if s[t] < 0:
                ub = min(ub, yG)
            else:
                lb = max(lb, yG)
        elif beta[t] <= 0:
            if s[t] > 0:
                ub = min(ub, yG)
            else:
                lb = max(lb, yG)
        else:
            nfree += 1
            sfree += yG
    if nfree > 0:
        rho = sfree / nfree
    else:
        rho = (ub + lb) / 2.0
    return beta, G, it, gap, -rho


@dataclass(frozen=True)
class SvrModel:
    dual_coeffs: np.ndarray
    bias: float
    train_ids: tuple
    C: float
    epsilon: float
    n_iter: int
    kkt_residual: float
    objective: float
    kernel_provenance: dict = field(default_factory=dict)

    @property
    def support_ids(self) -> tuple:
        return tuple(i for i, a in zip(self.train_ids, self.dual_coeffs) if a != 0.0)


def svr_dual_objective(K: np.ndarray, y: np.ndarray, beta: np.ndarray, epsilon: float) -> float:
    """``1/2 beta'Q beta + p'beta`` of the 2n-variable dual."""
    n = len(y)
    d = beta[:n] - beta[n:]
    return float(0.5 * d @ K @ d + epsilon * beta.sum() - y @ d)


def fit_svr(
    K_train,
    y,
    C: float = 1000.0,
    epsilon: float = 0.01,
    tol: float = 1e-3,
    max_iter: int = 1_000_000,
    train_ids=None,
    psd_tol: float = 1e-8,
    check_psd: bool = True,
) -> SvrModel:
    """Fit epsilon-SVR on a precomputed square kernel.

    Raises :class:`ConvergenceError` when the KKT gap is still above ``tol``
    after ``max_iter`` pair updates.
    """
    provenance = {}
    if hasattr(K_train, "values"):
        provenance = dict(K_train.provenance)
        if train_ids is None:
            train_ids = K_train.row_ids
        K_train = K_train.values
    K = np.ascontiguousarray(K_train, dtype=float)
    y = np.ascontiguousarray(y, dtype=float)
    n = len(y)
    if K.shape != (n, n):
        raise ValueError(f"kernel shape {K.shape} does not match {n} targets")
    if n < 2:
        raise ValueError("SVR needs at least two training points")
    if not np.all(np.isfinite(y)):
        raise DataError("targets contain non-finite values")
    if not np.all(np.isfinite(K)):
        raise DataError("kernel contains non-finite values")
    if not C > 0 or epsilon < 0:
        raise ValueError("need C > 0 and epsilon >= 0")
    if check_psd:
        if np.max(np.abs(K - K.T)) > 1e-8:
            raise ValueError("training kernel is not symmetric")
        min_eig = np.linalg.eigvalsh(K).min()
        if min_eig < -psd_tol * max(1.0, np.abs(K).max()):
            raise ValueError(f"training kernel is not PSD (min eigenvalue {min_eig:.3e})")
    beta, _G, n_iter, gap, bias = _smo(K, y, float(C), float(epsilon), float(tol), int(max_iter))
    if gap >= tol:
        raise ConvergenceError(f"SMO did not converge in {max_iter} iterations (KKT gap {gap:.3e} > tol {tol:g})")
    ids = tuple(str(i) for i in range(n)) if train_ids is None else tuple(str(i) for i in train_ids)
    return SvrModel(
        dual_coeffs=beta[:n] - beta[n:],
        bias=float(bias),
        train_ids=ids,
        C=float(C),
        epsilon=float(epsilon),
        n_iter=int(n_iter),
        kkt_residual=float(max(gap, 0.0)),
        objective=svr_dual_objective(K, y, beta, epsilon),
        kernel_provenance=provenance,
    )


def predict_svr(model: SvrModel, K_cross) -> np.ndarray:
    """``sum_i coef_i K_cross[j, i] + bias`` for each virtual row ``j``."""
    if hasattr(K_cross, "values"):
        if tuple(K_cross.col_ids) != model.train_ids:
            raise ValueError("kernel column ids do not match the training ids")
        K_cross = K_cross.values
    K_cross = np.asarray(K_cross, dtype=float)
    if K_cross.ndim != 2 or K_cross.shape[1] != len(model.dual_coeffs):
        raise ValueError(f"cross kernel needs {len(model.dual_coeffs)} columns, got shape {K_cross.shape}")
    return K_cross @ model.dual_coeffs + model.bias
