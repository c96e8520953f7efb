"""Campaign configuration: typed sections, validation and dict round trip."""

from __future__ import annotations

import dataclasses
import hashlib
import json
import operator
from dataclasses import dataclass, field, fields

import numpy as np

from ..errors import ConfigError
from ..qsim import build_feature_map
from ..regress import Surrogate
from ..regress.uncertainty import METHODS

OBJECTIVES = ("minimize", "maximize")
ACQUISITIONS = ("ei", "exploit", "cb", "random")
_OPS = {"<=": operator.le, ">=": operator.ge, "<": operator.lt, ">": operator.gt}


@dataclass(frozen=True)
class InitConstraint:
    """Predicate ``target <op> value`` restricting the initial pool; ``op = "none"`` disables it."""

    op: str = "none"
    value: float = 0.0

    def __post_init__(self):
        if self.op != "none" and self.op not in _OPS:
            raise ConfigError(f"init_constraint.op must be one of {['none', *_OPS]}, got {self.op!r}")

    def mask(self, y) -> np.ndarray:
        y = np.asarray(y, dtype=float)
        if self.op == "none":
            return np.ones(len(y), dtype=bool)
        return _OPS[self.op](y, self.value)


@dataclass(frozen=True)
class UncertaintyConfig:
    method: str = "cv"
    folds: int = 5
    resamples: int = 20

    def __post_init__(self):
        if self.method not in METHODS:
            raise ConfigError(f"uncertainty.method must be one of {METHODS}, got {self.method!r}")
        if self.folds < 2 or self.resamples < 2:
            raise ConfigError("uncertainty.folds and uncertainty.resamples must be >= 2")

    @property
    def min_observed(self) -> int:
        return {"cv": self.folds, "bootstrap": 2, "gpr_analytic": 1}[self.method]


@dataclass(frozen=True)
class AcquisitionConfig:
    """``ei``/``exploit``/``cb`` are oriented by the campaign objective; ``random`` is a baseline."""

    mode: str = "ei"
    kappa: float = 2.0

    def __post_init__(self):
        if self.mode not in ACQUISITIONS:
            raise ConfigError(f"acquisition.mode must be one of {ACQUISITIONS}, got {self.mode!r}")
        if self.kappa < 0:
            raise ConfigError("acquisition.kappa must be >= 0")

    def resolved(self, objective: str) -> str:
        minimize = objective == "minimize"
        return {
            "ei": "ei_min" if minimize else "ei_max",
            "exploit": "exploit_min" if minimize else "exploit_max",
            "cb": "lcb" if minimize else "ucb",
            "random": "random",
        }[self.mode]


@dataclass(frozen=True)
class PreprocessConfig:
    scale: bool = True
    pca_components: int = 0  # 0 disables PCA

    def __post_init__(self):
        if self.pca_components < 0:
            raise ConfigError("preprocessing.pca_components must be >= 0")


@dataclass(frozen=True)
class CampaignConfig:
    objective: str = "maximize"
    n_init: int = 10
    n_selected: int = 1
    n_cycles: int = 20
    n_runs: int = 20
    master_seed: int = 0
    init_constraint: InitConstraint = field(default_factory=InitConstraint)
    surrogate: Surrogate = field(default_factory=Surrogate)
    uncertainty: UncertaintyConfig = field(default_factory=UncertaintyConfig)
    acquisition: AcquisitionConfig = field(default_factory=AcquisitionConfig)
    preprocessing: PreprocessConfig = field(default_factory=PreprocessConfig)

    def __post_init__(self):
        if self.objective not in OBJECTIVES:
            raise ConfigError(f"objective must be one of {OBJECTIVES}, got {self.objective!r}")
        for key in ("n_init", "n_selected", "n_cycles", "n_runs"):
            if getattr(self, key) < 1:
                raise ConfigError(f"{key} must be >= 1, got {getattr(self, key)}")
        if self.master_seed < 0:
            raise ConfigError("master_seed must be >= 0")
        if self.acquisition.mode != "random" and self.n_init < self.uncertainty.min_observed:
            raise ConfigError(f"n_init={self.n_init} is below the {self.uncertainty.method} "
                              f"minimum of {self.uncertainty.min_observed}")
        if self.uncertainty.method == "gpr_analytic" and self.surrogate.regressor != "gpr":
            raise ConfigError("uncertainty.method gpr_analytic requires surrogate.regressor = 'gpr'")

    def with_overrides(self, **kw) -> "CampaignConfig":
        return dataclasses.replace(self, **kw)

    def digest(self) -> str:
        blob = json.dumps(config_to_dict(self), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


_SURROGATE_KEYS = tuple(f.name for f in fields(Surrogate) if f.name != "feature_map")
_FEATURE_MAP_KEYS = ("family", "n_qubits", "reps", "entanglement", "pauli_strings")
_TOP_KEYS = ("objective", "n_init", "n_selected", "n_cycles", "n_runs", "master_seed")
_SECTIONS = {
    "init_constraint": InitConstraint,
    "uncertainty": UncertaintyConfig,
    "acquisition": AcquisitionConfig,
    "preprocessing": PreprocessConfig,
}
CAMPAIGN_KEYS = _TOP_KEYS + tuple(_SECTIONS) + ("surrogate", "feature_map")


def _reject_unknown(section: dict, allowed, where: str):
    for key in section:
        if key not in allowed:
            raise ConfigError(f"unknown key {where}{key!r}")


def _typed(cls, section: dict, where: str):
    if not isinstance(section, dict):
        raise ConfigError(f"[{where}] must be a table")
    allowed = {f.name: f for f in fields(cls)}
    _reject_unknown(section, allowed, f"{where}.")
    kwargs = {}
    for key, val in section.items():
        default = getattr(cls(), key) if cls is not Surrogate else getattr(Surrogate, key)
        kwargs[key] = _coerce(val, default, f"{where}.{key}")
    try:
        return cls(**kwargs)
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"[{where}] {exc}") from None


def _coerce(val, default, where):
    if isinstance(default, bool):
        if not isinstance(val, bool):
            raise ConfigError(f"{where} must be a boolean")
        return val
    if isinstance(default, int):
        if isinstance(val, bool) or not isinstance(val, int):
            if isinstance(val, float) and val.is_integer() and where.endswith("max_iter"):
                return int(val)
            raise ConfigError(f"{where} must be an integer")
        return int(val)
    if isinstance(default, float):
        if isinstance(val, bool) or not isinstance(val, (int, float)):
            raise ConfigError(f"{where} must be a number")
        return float(val)
    if isinstance(default, str):
        if not isinstance(val, str):
            raise ConfigError(f"{where} must be a string")
        return str(val)
    return val


def config_from_dict(d: dict) -> CampaignConfig:
    """Build a validated config; unknown keys and type errors raise :class:`ConfigError`."""
    _reject_unknown(d, CAMPAIGN_KEYS, "")
    top = {}
    defaults = CampaignConfig()
    for key in _TOP_KEYS:
        if key in d:
            top[key] = _coerce(d[key], getattr(defaults, key), key)
    for key, cls in _SECTIONS.items():
        if key in d:
            top[key] = _typed(cls, dict(d[key]), key)
    fm = None
    if "feature_map" in d:
        sec = dict(d["feature_map"])
        _reject_unknown(sec, _FEATURE_MAP_KEYS, "feature_map.")
        if "family" not in sec or "n_qubits" not in sec:
            raise ConfigError("[feature_map] needs 'family' and 'n_qubits'")
        try:
            strings = sec.get("pauli_strings")
            fm = build_feature_map(sec["family"], int(sec["n_qubits"]), int(sec.get("reps", 1)),
                                   sec.get("entanglement"), strings)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"[feature_map] {exc}") from None
    sur = dict(d.get("surrogate", {}))
    _reject_unknown(sur, _SURROGATE_KEYS, "surrogate.")
    kwargs = {k: _coerce(v, getattr(Surrogate, k), f"surrogate.{k}") for k, v in sur.items()}
    try:
        top["surrogate"] = Surrogate(feature_map=fm, **kwargs)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"[surrogate] {exc}") from None
    return CampaignConfig(**top)


def config_to_dict(cfg: CampaignConfig) -> dict:
    out = {k: getattr(cfg, k) for k in _TOP_KEYS}
    for key in _SECTIONS:
        out[key] = dataclasses.asdict(getattr(cfg, key))
    out["surrogate"] = {k: getattr(cfg.surrogate, k) for k in _SURROGATE_KEYS}
    fm = cfg.surrogate.feature_map
    if fm is not None:
        out["feature_map"] = {
            "family": fm.family, "n_qubits": fm.n_qubits, "reps": fm.reps,
            "entanglement": fm.entanglement,
        }
        if fm.pauli_strings:
            out["feature_map"]["pauli_strings"] = list(fm.pauli_strings)
    return out
