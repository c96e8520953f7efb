"""Run aggregation, Gaussian KDE and cycles-to-optimum statistics."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class AggregateTrajectory:
    cycles: np.ndarray
    mean: np.ndarray
    min: np.ndarray
    max: np.ndarray


def aggregate_runs(result) -> AggregateTrajectory:
    """Per-cycle mean and envelope of best-so-far across runs.

    Shorter trajectories are padded with their final value.
    """
    runs = getattr(result, "runs", result)
    if not runs:
        raise ValueError("need at least one run")
    trajs = [np.asarray(getattr(r, "best_so_far", r), dtype=float) for r in runs]
    length = max(len(t) for t in trajs)
    stack = np.array([np.concatenate([t, np.full(length - len(t), t[-1])]) for t in trajs])
    return AggregateTrajectory(np.arange(length), stack.mean(axis=0), stack.min(axis=0), stack.max(axis=0))


def silverman_bandwidth(values) -> float:
    """``0.9 min(std, IQR/1.34) n^(-1/5)``, falling back to std, then to 1."""
    v = np.asarray(values, dtype=float)
    if v.size < 2:
        return 1.0
    std = v.std(ddof=1)
    q75, q25 = np.percentile(v, [75, 25])
    spread = min(std, (q75 - q25) / 1.34) if q75 > q25 else std
    if not spread > 0:
        return 1.0
    return 0.9 * spread * v.size ** -0.2


def kde(values, bandwidth: float | None = None, grid=None, n_grid: int = 200) -> tuple[np.ndarray, np.ndarray]:
    """Gaussian KDE ``(1/(n h)) sum phi((t - v_i)/h)``; returns ``(grid, density)``.

    The default grid spans the data +/- 4 bandwidths.
    """
    v = np.asarray(values, dtype=float).ravel()
    if v.size < 1:
        raise ValueError("kde needs at least one value")
    if not np.all(np.isfinite(v)):
        raise ValueError("kde values must be finite")
    h = silverman_bandwidth(v) if bandwidth is None else float(bandwidth)
    if not h > 0:
        raise ValueError("bandwidth must be positive")
    if grid is None:
        grid = np.linspace(v.min() - 4 * h, v.max() + 4 * h, n_grid)
    grid = np.asarray(grid, dtype=float)
    z = (grid[:, None] - v[None, :]) / h
    density = np.exp(-0.5 * z * z).sum(axis=1) / (v.size * h * math.sqrt(2.0 * math.pi))
    return grid, density


def cycles_to_optimum(run, optimum_id: str) -> int | None:
    """Cycle at which ``optimum_id`` was first observed (0 = initial pool), or None."""
    if optimum_id in run.initial_ids:
        return 0
    for c in run.cycles:
        if optimum_id in c.selected_ids:
            return c.cycle
    return None
