from __future__ import annotations

import numpy as np


def mae(y_true, y_pred) -> float:
    """Mean absolute error."""
    a, b = np.asarray(y_true, dtype=float), np.asarray(y_pred, dtype=float)
    if a.shape != b.shape:
        raise ValueError(f"length mismatch: {a.shape} vs {b.shape}")
    if a.size == 0:
        raise ValueError("mae of empty vectors")
    return float(np.mean(np.abs(a - b)))


def train_test_split(n: int, test_fraction: float = 0.05, seed=None) -> tuple[np.ndarray, np.ndarray]:
    """Seeded shuffle; at least one test and one training index."""
    if not 0 < test_fraction < 1:
        raise ValueError("test_fraction must be in (0, 1)")
    if n < 2:
        raise ValueError("need at least two records to split")
    perm = np.random.default_rng(seed).permutation(n)
    n_test = min(max(1, int(round(test_fraction * n))), n - 1)
    return np.sort(perm[n_test:]), np.sort(perm[:n_test])


def holdout_report(learner, X, y, test_fraction: float = 0.05, seed=None) -> dict:
    """Fit on the training split and report train/test MAE."""
    X, y = np.asarray(X, dtype=float), np.asarray(y, dtype=float)
    train, test = train_test_split(len(y), test_fraction, seed)
    K = learner.gram(X)
    model = learner.fit(K[np.ix_(train, train)], y[train])
    diag = np.diag(K)
    mu_tr, _ = learner.predict(model, K[np.ix_(train, train)], diag[train])
    mu_te, _ = learner.predict(model, K[np.ix_(test, train)], diag[test])
    return {
        "n_train": len(train),
        "n_test": len(test),
        "mae_train": mae(y[train], mu_tr),
        "mae_test": mae(y[test], mu_te),
    }
