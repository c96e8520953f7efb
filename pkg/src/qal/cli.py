"""Command-line front end.

Exit codes: 0 success, 1 usage or configuration error, 2 data error,
3 numerical failure. Every failure prints one line ``qal: error: <category>: <message>``
on standard error.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import logging
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import tomlkit

from . import __version__
from .campaign import (
    CampaignConfig,
    Dataset,
    config_from_dict,
    config_to_dict,
    emit_results,
    kde,
    preprocess,
    read_dataset_csv,
    run_campaign,
    standin_dataset,
    synthetic_dataset,
    write_dataset_csv,
)
from .campaign.synthetic import KINDS
from .descriptors import (
    DoublePerovskiteComposition,
    MbtrGrid,
    PerovskiteComposition,
    double_feature_names,
    double_perovskite_descriptor,
    mbtr_feature_names,
    mbtr_k2,
    parse_site,
    read_xyz,
    single_feature_names,
    single_perovskite_descriptor,
    spin_descriptor,
)
from .descriptors.structure import comment_energy, format_xyz
from .errors import ConfigError, DataError, NumericalError
from .kernels import KernelMatrix, write_kernel_csv
from .protocols import PROTOCOLS, protocol_text
from .regress import Surrogate, grid_search, holdout_report, write_grid_csv

log = logging.getLogger("qal")

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERICAL = 0, 1, 2, 3
VERBOSITY = {"quiet": logging.WARNING, "info": logging.INFO, "debug": logging.DEBUG}
_SURROGATE_FIELDS = {f.name for f in dataclasses.fields(Surrogate)} - {"feature_map", "regressor", "kernel"}


@dataclass(frozen=True)
class DataSection:
    dataset: str = ""
    standin: str = ""
    standin_seed: int = 0
    xyz_dir: str = ""


@dataclass(frozen=True)
class OutputSection:
    dir: str = "results"
    verbosity: str = "info"


@dataclass(frozen=True)
class KdeSection:
    bandwidth: float = 0.0  # 0 selects Silverman's rule
    n_grid: int = 200


@dataclass(frozen=True)
class FitSection:
    test_fraction: float = 0.05
    seed: int = 0


@dataclass(frozen=True)
class CliConfig:
    campaign: CampaignConfig = field(default_factory=CampaignConfig)
    data: DataSection = field(default_factory=DataSection)
    output: OutputSection = field(default_factory=OutputSection)
    kde: KdeSection = field(default_factory=KdeSection)
    fit: FitSection = field(default_factory=FitSection)
    grid: dict = field(default_factory=dict)
    base_dir: str = field(default=".", compare=False)

    def resolve(self, path: str) -> Path:
        """Relative paths are taken relative to the config file's directory."""
        p = Path(path)
        return p if p.is_absolute() else Path(self.base_dir) / p


_SIMPLE = {"data": DataSection, "output": OutputSection, "kde": KdeSection, "fit": FitSection}


def _plain(obj):
    """tomlkit items to plain Python containers."""
    if hasattr(obj, "unwrap"):
        return obj.unwrap()
    return obj


def _section(cls, raw, name):
    if not isinstance(raw, dict):
        raise ConfigError(f"[{name}] must be a table")
    defaults = cls()
    out = {}
    for key, val in raw.items():
        if not hasattr(defaults, key):
            raise ConfigError(f"unknown key {name}.{key!r}")
        want = type(getattr(defaults, key))
        if want is float and isinstance(val, int) and not isinstance(val, bool):
            val = float(val)
        if not isinstance(val, want) or (want is int and isinstance(val, bool)):
            raise ConfigError(f"{name}.{key} must be of type {want.__name__}")
        out[key] = val
    return cls(**out)


def config_from_document(doc: dict, base_dir: str = ".") -> CliConfig:
    doc = _plain(doc)
    allowed = set(_SIMPLE) | {"campaign", "grid"}
    for key in doc:
        if key not in allowed:
            raise ConfigError(f"unknown key {key!r}")
    kw = {name: _section(cls, doc[name], name) for name, cls in _SIMPLE.items() if name in doc}
    camp = doc.get("campaign", {})
    if not isinstance(camp, dict):
        raise ConfigError("[campaign] must be a table")
    kw["campaign"] = config_from_dict(camp)
    grid = doc.get("grid", {})
    if not isinstance(grid, dict):
        raise ConfigError("[grid] must be a table")
    for key, values in grid.items():
        if key not in _SURROGATE_FIELDS:
            raise ConfigError(f"unknown key grid.{key!r}")
        if not isinstance(values, list) or not values or not all(
                isinstance(v, (int, float)) and not isinstance(v, bool) for v in values):
            raise ConfigError(f"grid.{key} must be a non-empty list of numbers")
    kw["grid"] = {k: [float(v) for v in vals] for k, vals in grid.items()}
    cfg = CliConfig(base_dir=base_dir, **kw)
    if cfg.output.verbosity not in VERBOSITY:
        raise ConfigError(f"output.verbosity must be one of {sorted(VERBOSITY)}")
    if cfg.data.standin and cfg.data.dataset:
        raise ConfigError("set only one of data.dataset and data.standin")
    if cfg.data.standin and cfg.data.standin not in PROTOCOLS:
        raise ConfigError(f"data.standin must be one of {PROTOCOLS}")
    if not 0 < cfg.fit.test_fraction < 1:
        raise ConfigError("fit.test_fraction must be in (0, 1)")
    if cfg.kde.bandwidth < 0 or cfg.kde.n_grid < 2:
        raise ConfigError("kde.bandwidth must be >= 0 and kde.n_grid >= 2")
    return cfg


def parse_config_text(text: str, source: str = "<string>", base_dir: str = ".") -> CliConfig:
    try:
        doc = tomlkit.parse(text)
    except tomlkit.exceptions.ParseError as exc:
        raise ConfigError(f"{source}: {exc}") from None
    try:
        return config_from_document(doc, base_dir)
    except ConfigError as exc:
        raise ConfigError(f"{source}: {exc}") from None


def parse_config(path) -> CliConfig:
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {p}") from None
    except OSError as exc:
        raise ConfigError(f"cannot read config {p}: {exc.strerror}") from None
    return parse_config_text(text, str(p), str(p.resolve().parent))


def config_to_document(cfg: CliConfig) -> dict:
    doc = {name: dataclasses.asdict(getattr(cfg, name)) for name in _SIMPLE}
    doc["campaign"] = config_to_dict(cfg.campaign)
    if cfg.grid:
        doc["grid"] = {k: list(v) for k, v in cfg.grid.items()}
    return doc


def serialize_config(cfg: CliConfig) -> str:
    return tomlkit.dumps(config_to_document(cfg))


def apply_env(cfg: CliConfig, environ=os.environ) -> CliConfig:
    """``QAL_OUTPUT_DIR`` and ``QAL_VERBOSITY`` override the output section."""
    out = cfg.output
    if environ.get("QAL_OUTPUT_DIR"):
        out = dataclasses.replace(out, dir=environ["QAL_OUTPUT_DIR"])
    if environ.get("QAL_VERBOSITY"):
        if environ["QAL_VERBOSITY"] not in VERBOSITY:
            raise ConfigError(f"QAL_VERBOSITY must be one of {sorted(VERBOSITY)}")
        out = dataclasses.replace(out, verbosity=environ["QAL_VERBOSITY"])
    return dataclasses.replace(cfg, output=out)


def load_dataset(cfg: CliConfig) -> Dataset:
    if cfg.data.dataset:
        path = cfg.resolve(cfg.data.dataset)
        if not path.is_file():
            raise DataError(f"dataset not found: {path}")
        return read_dataset_csv(path)
    if cfg.data.standin:
        return standin_dataset(cfg.data.standin, cfg.data.standin_seed)[0]
    raise ConfigError("no dataset: set data.dataset or data.standin")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise _UsageError(message)


class _UsageError(Exception):
    pass


def _load_cli_config(args) -> CliConfig:
    if getattr(args, "protocol", None):
        if args.config:
            raise ConfigError("use either --config or --protocol")
        cfg = parse_config_text(protocol_text(args.protocol), f"protocol:{args.protocol}")
    elif args.config:
        cfg = parse_config(args.config)
    else:
        raise ConfigError("--config is required")
    cfg = apply_env(cfg)
    camp = cfg.campaign
    if getattr(args, "seed", None) is not None:
        camp = camp.with_overrides(master_seed=args.seed)
    if getattr(args, "runs", None) is not None:
        camp = camp.with_overrides(n_runs=args.runs)
    cfg = dataclasses.replace(cfg, campaign=camp)
    if getattr(args, "out", None):
        cfg = dataclasses.replace(cfg, output=dataclasses.replace(cfg.output, dir=args.out))
    logging.basicConfig(level=VERBOSITY[cfg.output.verbosity], stream=sys.stderr,
                        format="qal: %(levelname)s: %(message)s", force=True)
    return cfg


def _out_dir(cfg: CliConfig, args) -> Path:
    # --out is taken relative to the working directory; config paths relative to the config file.
    return Path(args.out) if getattr(args, "out", None) else cfg.resolve(cfg.output.dir)


def _model_rows(cfg: CliConfig, ds: Dataset) -> np.ndarray:
    X, _ = preprocess(cfg.campaign, ds.X, ds.X[:1])
    return X


def cmd_campaign(args) -> int:
    cfg = _load_cli_config(args)
    ds = load_dataset(cfg)
    log.info("campaign on %s: %d records, %d runs x %d cycles", ds.name, len(ds),
             cfg.campaign.n_runs, cfg.campaign.n_cycles)
    result = run_campaign(cfg.campaign, ds, threads=args.threads)
    paths = emit_results(result, ds, _out_dir(cfg, args), cfg.kde.bandwidth or None, cfg.kde.n_grid)
    for p in paths.values():
        print(p)
    return EXIT_OK


def cmd_kernel(args) -> int:
    cfg = _load_cli_config(args)
    ds = load_dataset(cfg)
    X = _model_rows(cfg, ds)
    values = cfg.campaign.surrogate.gram(X, threads=args.threads)
    K = KernelMatrix(values, list(ds.ids), list(ds.ids), {"kernel": cfg.campaign.surrogate.kernel})
    out = _out_dir(cfg, args)
    out.mkdir(parents=True, exist_ok=True)
    path = out / "kernel.csv"
    write_kernel_csv(K, path)
    print(path)
    return EXIT_OK


def cmd_fit(args) -> int:
    cfg = _load_cli_config(args)
    ds = load_dataset(cfg)
    seed = cfg.fit.seed if args.seed is None else args.seed
    report = holdout_report(cfg.campaign.surrogate, _model_rows(cfg, ds), ds.y, cfg.fit.test_fraction, seed)
    for key in ("n_train", "n_test", "mae_train", "mae_test"):
        val = report[key]
        print(f"{key}={val!r}" if isinstance(val, float) else f"{key}={val}")
    return EXIT_OK


def cmd_gridsearch(args) -> int:
    cfg = _load_cli_config(args)
    if not cfg.grid:
        raise ConfigError("gridsearch needs a [grid] table")
    ds = load_dataset(cfg)
    seed = cfg.campaign.master_seed
    res = grid_search(cfg.campaign.surrogate, cfg.grid, _model_rows(cfg, ds), ds.y,
                      cfg.campaign.uncertainty.folds, seed)
    out = _out_dir(cfg, args)
    out.mkdir(parents=True, exist_ok=True)
    write_grid_csv(res, out / "grid.csv")
    print(" ".join(f"{k}={float(v)!r}" if isinstance(v, float) else f"{k}={v}" for k, v in res.best.items()))
    return EXIT_OK


def _read_table(path) -> list[dict]:
    p = Path(path)
    if not p.is_file():
        raise DataError(f"input not found: {p}")
    with open(p, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


def cmd_descriptors(args) -> int:
    if bool(args.compositions) == bool(args.xyz_dir):
        raise ConfigError("give exactly one of --compositions or --xyz-dir")
    ids, rows, targets = [], [], []
    if args.compositions:
        table = _read_table(args.compositions)
        double = args.kind == "double"
        cols = ("A", "Ap", "B", "Bp") if double else ("A", "B")
        for lineno, rec in enumerate(table, 2):
            missing = [c for c in ("id", *cols) if not rec.get(c)]
            if missing:
                raise DataError(f"{args.compositions}:{lineno}: missing column(s) {missing}")
            try:
                sites = [parse_site(rec[c]) for c in cols]
                if double:
                    vec = double_perovskite_descriptor(DoublePerovskiteComposition(*sites))
                else:
                    vec = single_perovskite_descriptor(PerovskiteComposition(*sites))
            except ValueError as exc:
                raise DataError(f"{args.compositions}:{lineno}: {exc}") from None
            ids.append(rec["id"])
            rows.append(vec)
            targets.append(rec.get("target"))
        names = double_feature_names() if double else single_feature_names()
    else:
        d = Path(args.xyz_dir)
        files = sorted(d.glob("*.xyz"))
        if not files:
            raise DataError(f"no .xyz files in {d}")
        structures = [read_xyz(f) for f in files]
        species = sorted({s for st in structures for s in st.symbols})
        grid = MbtrGrid(args.mbtr_min, args.mbtr_max, args.mbtr_bins, args.mbtr_sigma)
        for f, st in zip(files, structures):
            try:
                vec = np.concatenate([mbtr_k2(st, grid, species), spin_descriptor(st.multiplicity)])
            except ValueError as exc:
                raise DataError(f"{f}: {exc}") from None
            ids.append(f.stem)
            rows.append(vec)
            targets.append(comment_energy(st))
        names = mbtr_feature_names(species, grid) + ["spin_2S+1", "spin_S", "spin_moment", "spin_unpaired"]
    have_target = all(t not in (None, "") for t in targets)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    if have_target:
        write_dataset_csv(Dataset(tuple(ids), np.array(rows), np.array([float(t) for t in targets]),
                                  tuple(names)), out)
    else:
        with open(out, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["id", *names])
            for rid, vec in zip(ids, rows):
                w.writerow([rid, *(repr(float(v)) for v in vec)])
    print(out)
    return EXIT_OK


def cmd_kde(args) -> int:
    table = _read_table(args.input)
    if table and args.column not in table[0]:
        raise DataError(f"{args.input}: missing column {args.column!r}")
    try:
        values = np.array([float(r[args.column]) for r in table])
    except ValueError:
        raise DataError(f"{args.input}: non-numeric value in column {args.column!r}") from None
    if values.size == 0:
        raise DataError(f"{args.input}: no rows")
    grid, density = kde(values, args.bandwidth, n_grid=args.n_grid)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    with open(out, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["grid", "density"])
        w.writerows([repr(float(g)), repr(float(d))] for g, d in zip(grid, density))
    print(out)
    return EXIT_OK


def cmd_synth(args) -> int:
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    seed = 0 if args.seed is None else args.seed
    if args.standin:
        ds, structures = standin_dataset(args.standin, seed)
        if structures:
            xyz_dir = out.with_suffix("").with_name(out.stem + "_xyz")
            xyz_dir.mkdir(parents=True, exist_ok=True)
            for rid, st in structures.items():
                (xyz_dir / f"{rid}.xyz").write_text(format_xyz(st), encoding="utf-8", newline="\n")
    else:
        if args.kind is None or args.n is None or args.dim is None:
            raise ConfigError("synth needs --kind, --n and --dim (or --standin)")
        ds = synthetic_dataset(args.kind, args.n, args.dim, seed)
    write_dataset_csv(ds, out)
    print(out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="qal", description="Quantum-kernel active learning.")
    p.add_argument("--version", action="version", version=f"qal {__version__}")
    sub = p.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
    sub.required = True

    def with_config(sp, runs=False, threads=True):
        sp.add_argument("--config", help="TOML configuration file")
        sp.add_argument("--seed", type=int, help="override the master seed")
        sp.add_argument("--out", help="output directory (overrides output.dir)")
        if runs:
            sp.add_argument("--runs", type=int, help="override n_runs")
        if threads:
            sp.add_argument("--threads", type=_positive_int, default=1, help="worker threads (default 1)")

    sp = sub.add_parser("campaign", help="run an active-learning campaign")
    with_config(sp, runs=True)
    sp.add_argument("--protocol", choices=PROTOCOLS, help="use a bundled protocol instead of --config")
    sp.set_defaults(func=cmd_campaign)

    sp = sub.add_parser("kernel", help="write the Gram matrix of a dataset")
    with_config(sp)
    sp.set_defaults(func=cmd_kernel)

    sp = sub.add_parser("fit", help="train/test MAE on a seeded split")
    with_config(sp, threads=False)
    sp.set_defaults(func=cmd_fit)

    sp = sub.add_parser("gridsearch", help="K-fold grid search over the [grid] table")
    with_config(sp, threads=False)
    sp.set_defaults(func=cmd_gridsearch)

    sp = sub.add_parser("descriptors", help="compositions or XYZ structures to a feature CSV")
    sp.add_argument("--compositions", help="CSV with id,A,B[,target] (single) or id,A,Ap,B,Bp[,target]")
    sp.add_argument("--kind", choices=("single", "double"), default="single")
    sp.add_argument("--xyz-dir", help="directory of .xyz files")
    sp.add_argument("--mbtr-min", type=float, default=0.2)
    sp.add_argument("--mbtr-max", type=float, default=0.7)
    sp.add_argument("--mbtr-bins", type=int, default=40)
    sp.add_argument("--mbtr-sigma", type=float, default=0.02)
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_descriptors)

    sp = sub.add_parser("kde", help="Gaussian KDE of one CSV column")
    sp.add_argument("--input", required=True)
    sp.add_argument("--column", default="target")
    sp.add_argument("--bandwidth", type=float, help="default: Silverman's rule")
    sp.add_argument("--n-grid", type=int, default=200)
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_kde)

    sp = sub.add_parser("synth", help="generate a synthetic dataset CSV")
    sp.add_argument("--kind", choices=KINDS)
    sp.add_argument("--n", type=int)
    sp.add_argument("--dim", type=int)
    sp.add_argument("--standin", choices=PROTOCOLS, help="schema-compatible stand-in for a benchmark system")
    sp.add_argument("--seed", type=int)
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_synth)
    return p


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid integer {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def _fail(category: str, message: str, code: int) -> int:
    text = " ".join(str(message).split())
    print(f"qal: error: {category}: {text}", file=sys.stderr)
    return code


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        return _fail("usage", exc, EXIT_USAGE)
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    try:
        return args.func(args)
    except ConfigError as exc:
        return _fail("config", exc, EXIT_USAGE)
    except DataError as exc:
        return _fail("data", exc, EXIT_DATA)
    except NumericalError as exc:
        return _fail("numerical", exc, EXIT_NUMERICAL)
    except (FloatingPointError, ArithmeticError) as exc:
        return _fail("numerical", exc, EXIT_NUMERICAL)
    except OSError as exc:
        return _fail("io", f"{exc.filename or ''} {exc.strerror or exc}".strip(), EXIT_DATA)
    except ValueError as exc:
        return _fail("data", exc, EXIT_DATA)


if __name__ == "__main__":
    sys.exit(main())
