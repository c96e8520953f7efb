"""Result files: trajectory, aggregate and KDE CSVs plus a JSON manifest."""

from __future__ import annotations

import csv
import json
import platform
from pathlib import Path

import numpy as np

from .analysis import aggregate_runs, kde, silverman_bandwidth
from .config import config_to_dict


def _f(x) -> str:
    return repr(float(x))


def _write(path: Path, header, rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def emit_results(result, dataset, out_dir, kde_bandwidth: float | None = None,
                 n_grid: int = 200) -> dict:
    """Write ``trajectory.csv``, ``aggregate.csv``, ``kde.csv``, ``kde_full.csv``, ``manifest.json``.

    ``kde.csv`` is the density of targets selected by the agent across all runs;
    ``kde_full.csv`` is the density of the whole dataset, on the same grid.
    Returns the paths written.
    """
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create output directory {out}: {exc.strerror}") from None
    paths = {name: out / name for name in
             ("trajectory.csv", "aggregate.csv", "kde.csv", "kde_full.csv", "manifest.json")}

    rows = []
    for r in result.runs:
        rows.append([r.run, 0, ";".join(r.initial_ids), _f(r.initial_best), ""])
        for c in r.cycles:
            rows.append([r.run, c.cycle, ";".join(c.selected_ids), _f(c.best_so_far),
                         ";".join(_f(t) for t in c.selected_targets)])
    _write(paths["trajectory.csv"], ["run", "cycle", "selected_ids", "best_so_far", "selected_targets"], rows)

    agg = aggregate_runs(result)
    _write(paths["aggregate.csv"], ["cycle", "mean", "min", "max"],
           [[int(c), _f(m), _f(lo), _f(hi)] for c, m, lo, hi in zip(agg.cycles, agg.mean, agg.min, agg.max)])

    sampled = np.array([t for r in result.runs for c in r.cycles for t in c.selected_targets])
    if sampled.size == 0:
        sampled = np.array([r.initial_best for r in result.runs])
    full = dataset.y
    h = kde_bandwidth or silverman_bandwidth(full)
    lo = min(full.min(), sampled.min()) - 4 * h
    hi = max(full.max(), sampled.max()) + 4 * h
    grid = np.linspace(lo, hi, n_grid)
    for name, values in (("kde.csv", sampled), ("kde_full.csv", full)):
        g, d = kde(values, kde_bandwidth, grid)
        _write(paths[name], ["grid", "density"], [[_f(a), _f(b)] for a, b in zip(g, d)])

    from .. import __version__

    manifest = {
        "config_digest": result.config.digest(),
        "config": config_to_dict(result.config),
        "dataset": result.dataset_name,
        "n_records": len(dataset),
        "master_seed": result.config.master_seed,
        "run_seeds": [r.seed for r in result.runs],
        "versions": {"qal": __version__, "numpy": np.__version__, "python": platform.python_version()},
    }
    with open(paths["manifest.json"], "w", encoding="utf-8", newline="\n") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return {k: str(v) for k, v in paths.items()}
