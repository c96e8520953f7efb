"""Predictive mean and epistemic spread on virtual points.

Resampling methods train one model per partition and report the mean and the
sample standard deviation (``ddof=1``) of the per-model predictions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import NumericalError

METHODS = ("cv", "bootstrap", "gpr_analytic")


@dataclass(frozen=True)
class UncertaintyEstimate:
    mu: np.ndarray
    sigma: np.ndarray
    method: str
    resamples: int


def summarize_predictions(preds) -> tuple[np.ndarray, np.ndarray]:
    """Mean and sample std over axis 0 of a ``(P, m)`` prediction stack."""
    preds = np.asarray(preds, dtype=float)
    if preds.ndim != 2 or preds.shape[0] < 2:
        raise ValueError("need predictions from at least two models")
    return preds.mean(axis=0), preds.std(axis=0, ddof=1)


def _joint_gram(learner, X_obs, X_virt):
    X_obs = np.asarray(X_obs, dtype=float)
    X_virt = np.asarray(X_virt, dtype=float)
    if X_obs.ndim != 2 or X_virt.ndim != 2 or X_obs.shape[1] != X_virt.shape[1]:
        raise ValueError("observed and virtual rows must be 2-D with equal widths")
    K = learner.gram(np.vstack([X_obs, X_virt]))
    return K, len(X_obs)


def _fit_predict(learner, K, train, virt, y_obs):
    model = learner.fit(K[np.ix_(train, train)], y_obs[train])
    mu, _ = learner.predict(model, K[np.ix_(virt, train)], np.diag(K)[virt])
    return mu


def cv_uncertainty(learner, X_obs, y_obs, X_virt, folds: int = 5, seed=None) -> UncertaintyEstimate:
    """K-fold resampling: one model per left-out fold, shuffled with ``seed``."""
    y_obs = np.asarray(y_obs, dtype=float)
    n = len(y_obs)
    if folds < 2:
        raise ValueError("folds must be >= 2")
    if n < folds:
        raise ValueError(f"{n} observed points cannot be split into {folds} folds")
    K, n_obs = _joint_gram(learner, X_obs, X_virt)
    virt = np.arange(n_obs, K.shape[0])
    perm = np.random.default_rng(seed).permutation(n)
    preds = []
    for held_out in np.array_split(perm, folds):
        train = np.sort(np.setdiff1d(perm, held_out))
        preds.append(_fit_predict(learner, K, train, virt, y_obs))
    mu, sigma = summarize_predictions(preds)
    return UncertaintyEstimate(mu, sigma, "cv", folds)


def bootstrap_uncertainty(
    learner, X_obs, y_obs, X_virt, B: int = 20, seed=None, max_retries: int = 10
) -> UncertaintyEstimate:
    """Non-parametric bootstrap over the observed set.

    Resamples with fewer than two distinct points, or whose fit fails, are
    redrawn; more than ``max_retries`` redraws in total is an error.
    """
    y_obs = np.asarray(y_obs, dtype=float)
    n = len(y_obs)
    if B < 2:
        raise ValueError("B must be >= 2")
    if n < 2:
        raise ValueError("bootstrap needs at least two observed points")
    K, n_obs = _joint_gram(learner, X_obs, X_virt)
    virt = np.arange(n_obs, K.shape[0])
    rng = np.random.default_rng(seed)
    preds, retries = [], 0
    while len(preds) < B:
        idx = np.sort(rng.integers(0, n, size=n))
        try:
            if len(np.unique(idx)) < 2:
                raise NumericalError("degenerate resample")
            preds.append(_fit_predict(learner, K, idx, virt, y_obs))
        except (NumericalError, ValueError):
            retries += 1
            if retries > max_retries:
                raise NumericalError(f"bootstrap gave up after {max_retries} degenerate resamples") from None
    mu, sigma = summarize_predictions(preds)
    return UncertaintyEstimate(mu, sigma, "bootstrap", B)


def gpr_uncertainty(learner, X_obs, y_obs, X_virt) -> UncertaintyEstimate:
    """Analytic GP posterior from a single fit on all observed points."""
    if getattr(learner, "regressor", "gpr") != "gpr":
        raise ValueError("analytic uncertainty requires a GPR surrogate")
    y_obs = np.asarray(y_obs, dtype=float)
    K, n_obs = _joint_gram(learner, X_obs, X_virt)
    train = np.arange(n_obs)
    virt = np.arange(n_obs, K.shape[0])
    model = learner.fit(K[np.ix_(train, train)], y_obs)
    mu, sigma = learner.predict(model, K[np.ix_(virt, train)], np.diag(K)[virt])
    return UncertaintyEstimate(mu, sigma, "gpr_analytic", 1)


def estimate(learner, method: str, X_obs, y_obs, X_virt, folds: int = 5, resamples: int = 20,
             seed=None) -> UncertaintyEstimate:
    if method == "cv":
        return cv_uncertainty(learner, X_obs, y_obs, X_virt, folds, seed)
    if method == "bootstrap":
        return bootstrap_uncertainty(learner, X_obs, y_obs, X_virt, resamples, seed)
    if method == "gpr_analytic":
        return gpr_uncertainty(learner, X_obs, y_obs, X_virt)
    raise ValueError(f"unknown uncertainty method {method!r}; expected one of {METHODS}")
