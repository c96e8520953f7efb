"""Seeded synthetic datasets standing in for the unpublished experimental tables.

Kinds:

``smooth_bowl``
    Uniform points in the unit cube, target ``|x - c|^2``; minimum is the record
    nearest the bowl center ``c``.
``rough_multimodal``
    The bowl plus a cosine ripple of amplitude ``roughness``; the generator
    asserts at least two 1-nearest-neighbor local minima.
``perovskite_like``
    Descriptor rows of generated Ba(1-x)A_xTi(1-y)B_yO3 compositions (first
    ``dim`` of the 34 features) or AA'BB'O6 compositions (``dim = 64``), with a
    smooth nonlinear target of the emitted features scaled to [0, 1].

``homotop_dataset`` builds (homotop, multiplicity) records for a 14-atom
3Al@Si11-like cluster with MBTR + spin features and a model total energy.
"""

from __future__ import annotations

import itertools

import numpy as np

from ..descriptors import (
    DoublePerovskiteComposition,
    IonPropertyTable,
    MbtrGrid,
    PerovskiteComposition,
    Structure,
    double_feature_names,
    double_perovskite_descriptor,
    mbtr_feature_names,
    mbtr_k2,
    single_feature_names,
    single_perovskite_descriptor,
    spin_descriptor,
)
from .dataset import Dataset

KINDS = ("smooth_bowl", "rough_multimodal", "perovskite_like")


def _check(n_records: int, dim: int):
    if n_records < 2:
        raise ValueError("n_records must be >= 2")
    if dim < 1:
        raise ValueError("dim must be >= 1")


def nn_local_minima(X: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Indices whose target is below that of their nearest neighbor."""
    d2 = ((X[:, None, :] - X[None, :, :]) ** 2).sum(-1)
    np.fill_diagonal(d2, np.inf)
    nn = np.argmin(d2, axis=1)
    return np.flatnonzero(y < y[nn])


def smooth_bowl(n_records: int, dim: int, seed=None) -> Dataset:
    _check(n_records, dim)
    rng = np.random.default_rng(seed)
    center = rng.uniform(0.3, 0.7, size=dim)
    X = rng.uniform(0.0, 1.0, size=(n_records, dim))
    y = ((X - center) ** 2).sum(axis=1)
    return Dataset(_ids(n_records), X, y, name="smooth_bowl",
                   meta={"center": center, "objective": "minimize"})


def rough_multimodal(n_records: int, dim: int, seed=None, roughness: float = 1.0,
                     frequency: float = 3.0) -> Dataset:
    _check(n_records, dim)
    if n_records < 4:
        raise ValueError("rough_multimodal needs at least 4 records")
    rng = np.random.default_rng(seed)
    center = rng.uniform(0.3, 0.7, size=dim)
    X = rng.uniform(0.0, 1.0, size=(n_records, dim))
    ripple = (1.0 - np.cos(2.0 * np.pi * frequency * (X - center))).sum(axis=1)
    y = ((X - center) ** 2).sum(axis=1) + 0.1 * roughness * ripple
    minima = nn_local_minima(X, y)
    assert len(minima) >= 2, "generator produced fewer than two local optima"
    return Dataset(_ids(n_records), X, y, name="rough_multimodal",
                   meta={"center": center, "objective": "minimize", "local_minima": minima})


_A_SUBST = ("Ca2+", "Sr2+", "Cd2+")
_B_SUBST = ("Zr4+", "Sn4+", "Hf4+")
_FRACTIONS = np.round(np.arange(0.0, 0.51, 0.05), 10)


def _single_rows(n, rng, table):
    combos = []
    for a, x in itertools.product(_A_SUBST, _FRACTIONS):
        for b, yb in itertools.product(_B_SUBST, _FRACTIONS):
            combos.append((a, x, b, yb))
    seen, rows, labels = set(), [], []
    for k in rng.permutation(len(combos)):
        a, x, b, yb = combos[k]
        key = (a if x > 0 else "-", x, b if yb > 0 else "-", yb)
        if key in seen:
            continue
        seen.add(key)
        site_a = {"Ba2+": 1.0 - x, a: x} if x > 0 else {"Ba2+": 1.0}
        site_b = {"Ti4+": 1.0 - yb, b: yb} if yb > 0 else {"Ti4+": 1.0}
        comp = PerovskiteComposition.from_fractions(site_a, site_b, table)
        rows.append(single_perovskite_descriptor(comp, table))
        labels.append(f"Ba{1 - x:g}{a[:-2]}{x:g}Ti{1 - yb:g}{b[:-2]}{yb:g}O3")
        if len(rows) == n:
            return np.array(rows), labels
    raise ValueError(f"at most {len(rows)} distinct single-perovskite compositions are available")


def _double_rows(n, rng, table):
    a_ions = [r.ion for r in table if r.coordination == "XII"]
    b_ions = [r.ion for r in table if r.coordination == "VI"]
    a_pairs = list(itertools.combinations_with_replacement(a_ions, 2))
    b_pairs = list(itertools.combinations(b_ions, 2))
    total = len(a_pairs) * len(b_pairs)
    if n > total:
        raise ValueError(f"at most {total} distinct double-perovskite compositions are available")
    rows, labels = [], []
    for k in rng.choice(total, size=n, replace=False):
        (a, a2), (b, b2) = a_pairs[k // len(b_pairs)], b_pairs[k % len(b_pairs)]
        comp = DoublePerovskiteComposition.from_fractions({a: 1}, {a2: 1}, {b: 1}, {b2: 1}, table)
        rows.append(double_perovskite_descriptor(comp, table))
        labels.append(f"{a[:-2]}{a2.rstrip('+0123456789')}{b[:-2]}{b2.rstrip('+0123456789')}O6")
    return np.array(rows), labels


def _response(X: np.ndarray, rng, roughness: float) -> np.ndarray:
    """Smooth random-feature response of standardized columns, scaled to [0, 1]."""
    std = X.std(axis=0)
    Z = (X - X.mean(axis=0)) / np.where(std > 1e-12, std, 1.0)
    W = rng.normal(size=(X.shape[1], 4)) / np.sqrt(X.shape[1])
    a = rng.normal(size=4)
    y = np.tanh(Z @ W) @ a - 0.15 * ((Z @ W[:, 0]) ** 2)
    if roughness:
        V = rng.normal(size=X.shape[1]) / np.sqrt(X.shape[1])
        y = y + 0.2 * roughness * np.sin(3.0 * Z @ V)
    span = y.max() - y.min()
    return (y - y.min()) / (span if span > 0 else 1.0)


def perovskite_like(n_records: int, dim: int, seed=None, roughness: float = 0.5,
                    table: IonPropertyTable | None = None) -> Dataset:
    _check(n_records, dim)
    table = table or IonPropertyTable.default()
    rng = np.random.default_rng(seed)
    if dim == 64:
        X, labels = _double_rows(n_records, rng, table)
        names = double_feature_names()
    elif dim <= 34:
        X, labels = _single_rows(n_records, rng, table)
        X, names = X[:, :dim], single_feature_names()[:dim]
    else:
        raise ValueError("perovskite_like supports dim <= 34 (single) or dim = 64 (double)")
    y = _response(X, rng, roughness)
    return Dataset(_ids(n_records), X, y, tuple(names), name="perovskite_like",
                   meta={"compositions": labels})


def synthetic_dataset(kind: str, n_records: int, dim: int, seed=None, **kw) -> Dataset:
    if kind == "smooth_bowl":
        return smooth_bowl(n_records, dim, seed, **kw)
    if kind == "rough_multimodal":
        return rough_multimodal(n_records, dim, seed, **kw)
    if kind == "perovskite_like":
        return perovskite_like(n_records, dim, seed, **kw)
    raise ValueError(f"unknown synthetic kind {kind!r}; expected one of {KINDS}")


def _ids(n: int) -> tuple:
    width = len(str(n - 1))
    return tuple(f"r{k:0{width}d}" for k in range(n))


def _cluster_sites(rng) -> np.ndarray:
    """One center plus 13 near-spherical shell sites (Angstrom), lightly jittered."""
    k = np.arange(13) + 0.5
    phi = np.arccos(1.0 - 2.0 * k / 13)
    theta = np.pi * (1.0 + 5.0 ** 0.5) * k
    shell = 2.45 * np.c_[np.cos(theta) * np.sin(phi), np.sin(theta) * np.sin(phi), np.cos(phi)]
    return np.vstack([[0.0, 0.0, 0.0], shell]) + rng.normal(scale=0.05, size=(14, 3))


def homotop_dataset(n_homotops: int = 165, multiplicities=(2, 4, 6), seed=None,
                    grid: MbtrGrid | None = None):
    """Records for (homotop, multiplicity) pairs of a 3Al@Si11 model cluster.

    Returns ``(dataset, structures)`` where ``structures`` maps record id to
    :class:`Structure`. Features are the MBTR vector followed by the spin
    descriptor; targets are model energies in Hartree (lower is better).
    """
    grid = grid or MbtrGrid(0.2, 0.7, 40, 0.02)
    rng = np.random.default_rng(seed)
    sites = _cluster_sites(rng)
    placements = list(itertools.combinations(range(14), 3))
    if n_homotops > len(placements):
        raise ValueError(f"only {len(placements)} homotops exist")
    chosen = sorted(rng.choice(len(placements), size=n_homotops, replace=False))
    species = ("Al", "Si")
    spin_offset = {m: 0.004 * k for k, m in enumerate(sorted(multiplicities))}
    ids, rows, energies, structures = [], [], [], {}
    for h, p in enumerate(chosen):
        al = placements[p]
        symbols = tuple("Al" if i in al else "Si" for i in range(14))
        pos = sites + rng.normal(scale=0.03, size=(14, 3))
        d = np.linalg.norm(pos[:, None] - pos[None, :], axis=-1)
        al_al = sum(1.0 / d[i, j] for i, j in itertools.combinations(al, 2))
        center_al = 1.0 if 0 in al else 0.0
        base = -3508.0 + 0.02 * al_al + 0.015 * center_al + 0.002 * rng.normal()
        mbtr = mbtr_k2(Structure(symbols, pos), grid, species)
        for m in multiplicities:
            rid = f"h{h:03d}_m{m}"
            # Spin penalty grows with the Al-Al separation pattern so the best SM varies.
            e = base + spin_offset[m] * (1.0 - 0.5 * al_al)
            ids.append(rid)
            rows.append(np.concatenate([mbtr, spin_descriptor(m)]))
            energies.append(e)
            structures[rid] = Structure(symbols, pos, m, f"multiplicity={m} energy={float(e)!r}")
    names = mbtr_feature_names(species, grid) + ["spin_2S+1", "spin_S", "spin_moment", "spin_unpaired"]
    ds = Dataset(tuple(ids), np.array(rows), np.array(energies), tuple(names), name="homotops")
    return ds, structures
