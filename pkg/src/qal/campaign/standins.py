"""Schema-compatible synthetic stand-ins for the four benchmark systems.

Record counts and feature widths follow the real tables. Targets are mapped
affinely into physical units so that the initial-pool constraint threshold
sits at a fixed quantile, which keeps every protocol feasible.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .dataset import Dataset
from .synthetic import homotop_dataset, perovskite_like


@dataclass(frozen=True)
class StandinSpec:
    n_records: int
    dim: int
    threshold: float
    quantile: float
    best: float  # best attainable target in physical units
    units: str


STANDINS = {
    "system_1": StandinSpec(74, 7, 300.0, 0.4, 500.0, "pC/N"),
    "system_2": StandinSpec(54, 64, 2.0, 0.6, 0.5, "eV"),
    "system_3": StandinSpec(242, 34, 65.0, 0.4, 120.0, "mJ/cm3"),
}


def _rescale(y: np.ndarray, spec: StandinSpec) -> np.ndarray:
    q = np.quantile(y, spec.quantile)
    if spec.best > spec.threshold:  # maximize: top maps to best
        return spec.threshold + (y - q) * (spec.best - spec.threshold) / (y.max() - q)
    return spec.threshold + (y - q) * (spec.threshold - spec.best) / (q - y.min())


def standin_dataset(system: str, seed=0):
    """Return ``(dataset, structures)``; ``structures`` is empty except for system_4."""
    if system == "system_4":
        return homotop_dataset(seed=seed)
    try:
        spec = STANDINS[system]
    except KeyError:
        raise ValueError(f"unknown stand-in {system!r}; expected system_1..system_4") from None
    ds = perovskite_like(spec.n_records, spec.dim, seed=seed)
    ds = replace(ds, y=_rescale(ds.y, spec), name=f"{system}_standin",
                 meta={**ds.meta, "units": spec.units})
    return ds, {}
