"""The active-learning loop: initial pool, per-cycle refit, selection, oracle lookup."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .. import acquire
from ..descriptors import pca_fit, standard_scale
from ..errors import ConfigError, DataError, QalError
from ..regress.uncertainty import UncertaintyEstimate, estimate
from .config import CampaignConfig
from .dataset import Dataset


def run_seed(master_seed: int, run: int) -> int:
    """Independent 63-bit seed for run ``run``, derived by spawning from ``master_seed``."""
    ss = np.random.SeedSequence(master_seed, spawn_key=(run,))
    return int(ss.generate_state(1, np.uint64)[0] >> np.uint64(1))


def cycle_seed(seed: int, cycle: int) -> np.random.SeedSequence:
    """Seed stream for the resampling shuffles of one cycle."""
    return np.random.SeedSequence(seed, spawn_key=(cycle,))


def _better(objective: str):
    return np.min if objective == "minimize" else np.max


def init_pool(dataset: Dataset, constraint, n_init: int, seed) -> tuple[np.ndarray, np.ndarray]:
    """Sample ``n_init`` qualifying records as the observed set; the rest is virtual.

    Returns index arrays (observed sorted ascending, virtual ascending).
    """
    eligible = np.flatnonzero(constraint.mask(dataset.y))
    if len(eligible) < n_init:
        raise DataError(f"init constraint admits {len(eligible)} records, need n_init={n_init}")
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(0,)))
    observed = np.sort(rng.choice(eligible, size=n_init, replace=False))
    virtual = np.setdiff1d(np.arange(len(dataset)), observed)
    return observed, virtual


def preprocess(config: CampaignConfig, X_obs: np.ndarray, X_virt: np.ndarray):
    """Fit scaler then PCA on observed rows only and apply both to both sets."""
    if config.preprocessing.scale:
        sc = standard_scale(X_obs)
        X_obs, X_virt = sc.transform(X_obs), sc.transform(X_virt)
    k = config.preprocessing.pca_components
    if k:
        if k > min(len(X_obs) - 1, X_obs.shape[1]):
            raise ConfigError(f"pca_components={k} needs at least {k + 1} observed rows "
                              f"and {k} features")
        pca = pca_fit(X_obs, k)
        X_obs, X_virt = pca.transform(X_obs), pca.transform(X_virt)
    return X_obs, X_virt


def check_dimensions(config: CampaignConfig, dataset: Dataset) -> None:
    fm = config.surrogate.feature_map
    if fm is None or not config.surrogate.is_quantum:
        return
    width = config.preprocessing.pca_components or dataset.dim
    if fm.family != "HighDim" and width != fm.n_qubits:
        raise ConfigError(f"feature map {fm.family} has {fm.n_qubits} qubits but the model input "
                          f"has {width} features")


@dataclass(frozen=True)
class CycleRecord:
    cycle: int
    selected_ids: tuple
    selected_targets: tuple
    best_so_far: float


@dataclass(frozen=True)
class RunResult:
    run: int
    seed: int
    initial_ids: tuple
    initial_best: float
    cycles: tuple  # CycleRecord per cycle 1..n_cycles
    observed_ids: tuple

    @property
    def best_so_far(self) -> np.ndarray:
        """Length ``n_cycles + 1``; entry 0 is the initial-pool best."""
        return np.array([self.initial_best] + [c.best_so_far for c in self.cycles])

    @property
    def selected_ids(self) -> list:
        return [i for c in self.cycles for i in c.selected_ids]


@dataclass(frozen=True)
class CampaignResult:
    config: CampaignConfig
    dataset_name: str
    runs: tuple


def run_single(config: CampaignConfig, dataset: Dataset, seed: int, run: int = 0,
               estimator=None) -> RunResult:
    """One campaign run.

    ``estimator(obs_idx, virt_idx, X_obs, y_obs, X_virt, seed)`` may replace the
    configured surrogate; it returns an :class:`UncertaintyEstimate` or a
    ``(mu, sigma)`` pair. When the virtual pool empties, remaining cycles are
    padded with empty selections and the last best value.
    """
    check_dimensions(config, dataset)
    pick_best = _better(config.objective)
    observed, virtual = init_pool(dataset, config.init_constraint, config.n_init, seed)
    observed, virtual = list(observed), list(virtual)
    initial_ids = tuple(dataset.ids[i] for i in observed)
    best = float(pick_best(dataset.y[observed]))
    initial_best = best
    mode = config.acquisition.resolved(config.objective)
    learner = config.surrogate
    cycles = []
    for cycle in range(1, config.n_cycles + 1):
        if not virtual:
            cycles.append(CycleRecord(cycle, (), (), best))
            continue
        k = min(config.n_selected, len(virtual))
        cseed = cycle_seed(seed, cycle)
        try:
            if mode == "random":
                rng = np.random.default_rng(cseed)
                picks = rng.choice(len(virtual), size=k, replace=False)
            else:
                obs_idx, virt_idx = np.array(observed), np.array(virtual)
                y_obs = dataset.y[obs_idx]
                X_obs, X_virt = preprocess(config, dataset.X[obs_idx], dataset.X[virt_idx])
                if estimator is not None:
                    est = estimator(obs_idx, virt_idx, X_obs, y_obs, X_virt, cseed)
                else:
                    est = estimate(learner, config.uncertainty.method, X_obs, y_obs, X_virt,
                                   config.uncertainty.folds, config.uncertainty.resamples, cseed)
                if isinstance(est, UncertaintyEstimate):
                    mu, sigma = est.mu, est.sigma
                else:
                    mu, sigma = est
                scores = acquire.score(mode, mu, sigma, best, config.acquisition.kappa)
                picks = acquire.select_batch(scores, k)
        except QalError as exc:
            raise type(exc)(f"run {run} cycle {cycle}: {exc}") from exc
        chosen = [virtual[i] for i in picks]
        chosen_set = set(chosen)
        virtual = [v for v in virtual if v not in chosen_set]
        observed.extend(chosen)
        targets = tuple(float(dataset.y[i]) for i in chosen)
        best = float(pick_best([best, *targets]))
        cycles.append(CycleRecord(cycle, tuple(dataset.ids[i] for i in chosen), targets, best))
    return RunResult(run, seed, initial_ids, initial_best, tuple(cycles),
                     tuple(dataset.ids[i] for i in observed))


def run_campaign(config: CampaignConfig, dataset: Dataset, threads: int = 1,
                 estimator=None) -> CampaignResult:
    """Run ``config.n_runs`` independent runs, in parallel when ``threads > 1``.

    Each run is sequential and seeded only by ``(master_seed, run)``, so the
    result does not depend on scheduling.
    """
    if threads < 1:
        raise ConfigError("threads must be >= 1")
    seeds = [run_seed(config.master_seed, r) for r in range(config.n_runs)]

    def one(r):
        return run_single(config, dataset, seeds[r], r, estimator)

    if threads > 1 and config.n_runs > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            runs = list(pool.map(one, range(config.n_runs)))
    else:
        runs = [one(r) for r in range(config.n_runs)]
    return CampaignResult(config, dataset.name, tuple(runs))
