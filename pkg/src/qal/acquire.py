"""Acquisition functions and top-k batch selection.

Scores are oriented so that larger is always better; selection takes the k
largest scores with ties going to the smaller index.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import erfc

MODES = ("ei_min", "ei_max", "exploit_min", "exploit_max", "lcb", "ucb")
SIGMA_FLOOR = 1e-12
_INV_SQRT2 = 1.0 / math.sqrt(2.0)
_INV_SQRT2PI = 1.0 / math.sqrt(2.0 * math.pi)


@dataclass(frozen=True)
class AcquisitionScores:
    scores: np.ndarray
    mode: str
    incumbent: float | None = None


def norm_cdf(z):
    """Standard normal CDF via ``erfc`` (accurate in the lower tail)."""
    return 0.5 * erfc(-np.asarray(z, dtype=float) * _INV_SQRT2)


def norm_pdf(z):
    z = np.asarray(z, dtype=float)
    return _INV_SQRT2PI * np.exp(-0.5 * z * z)


def _finite(*arrays):
    out = [np.asarray(a, dtype=float) for a in arrays]
    for a in out:
        if not np.all(np.isfinite(a)):
            raise ValueError("acquisition inputs must be finite")
    if np.any(out[1] < 0):
        raise ValueError("sigma must be non-negative")
    return out


def _expected_improvement(T, sigma):
    safe = np.where(sigma > SIGMA_FLOOR, sigma, 1.0)
    z = T / safe
    ei = T * norm_cdf(z) + sigma * norm_pdf(z)
    ei = np.where(sigma > SIGMA_FLOOR, ei, np.maximum(T, 0.0))
    return np.maximum(ei, 0.0)


def ei_min(mu, sigma, f_min):
    """Expected improvement below the incumbent ``f_min``; ``max(f_min - mu, 0)`` as sigma -> 0."""
    mu, sigma, f_min = _finite(mu, sigma, f_min)
    out = _expected_improvement(f_min - mu, sigma)
    return float(out) if out.ndim == 0 else out


def ei_max(mu, sigma, f_max):
    """Expected improvement above the incumbent ``f_max``."""
    mu, sigma, f_max = _finite(mu, sigma, f_max)
    out = _expected_improvement(mu - f_max, sigma)
    return float(out) if out.ndim == 0 else out


def confidence_bound(mu, sigma, kappa: float = 2.0, direction: str = "maximize"):
    """UCB ``mu + kappa sigma`` when maximizing; negated LCB ``-(mu - kappa sigma)`` when minimizing."""
    mu, sigma = _finite(mu, sigma)
    if kappa < 0:
        raise ValueError("kappa must be non-negative")
    if direction == "maximize":
        out = mu + kappa * sigma
    elif direction == "minimize":
        out = -(mu - kappa * sigma)
    else:
        raise ValueError(f"unknown direction {direction!r}")
    return float(out) if out.ndim == 0 else out


def exploit(mu, direction: str = "maximize"):
    mu = np.asarray(mu, dtype=float)
    if direction == "maximize":
        return mu.copy()
    if direction == "minimize":
        return -mu
    raise ValueError(f"unknown direction {direction!r}")


def score(mode: str, mu, sigma=None, incumbent=None, kappa: float = 2.0) -> AcquisitionScores:
    mu = np.asarray(mu, dtype=float)
    sigma = np.zeros_like(mu) if sigma is None else np.asarray(sigma, dtype=float)
    if mode == "ei_min":
        s = ei_min(mu, sigma, incumbent)
    elif mode == "ei_max":
        s = ei_max(mu, sigma, incumbent)
    elif mode == "exploit_min":
        s = exploit(mu, "minimize")
    elif mode == "exploit_max":
        s = exploit(mu, "maximize")
    elif mode == "lcb":
        s = confidence_bound(mu, sigma, kappa, "minimize")
    elif mode == "ucb":
        s = confidence_bound(mu, sigma, kappa, "maximize")
    else:
        raise ValueError(f"unknown acquisition mode {mode!r}; expected one of {MODES}")
    return AcquisitionScores(np.atleast_1d(np.asarray(s, dtype=float)), mode,
                             None if incumbent is None else float(incumbent))


def select_batch(scores, k: int) -> np.ndarray:
    """Indices of the ``k`` largest scores, descending, ties to the smaller index."""
    values = np.asarray(getattr(scores, "scores", scores), dtype=float)
    if values.size == 0:
        raise ValueError("no virtual points to select from")
    if not 1 <= k <= values.size:
        raise ValueError(f"k={k} out of range for {values.size} virtual points")
    return np.argsort(-values, kind="stable")[:k]
