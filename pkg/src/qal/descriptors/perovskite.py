"""Composition-weighted elemental descriptors for ABO3 and AA'BB'O6 perovskites.

Feature order of the 34-vector::

    t_f, t_new,
    A_<prop> x 8, B_<prop> x 8,
    A/B_<prop> x 8, A*B_<prop> x 8

and of the 64-vector::

    A_<prop>, A'_<prop>, B_<prop>, B'_<prop>        (8 each)
    A/B_<prop>, A'/B'_<prop>, A*B_<prop>, A'*B'_<prop>  (8 each)

with ``<prop>`` running over :data:`PROPERTIES`.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from importlib import resources

import numpy as np

from ..errors import DataError

PROPERTIES = (
    "shannon_radius",
    "ideal_bond_length",
    "electronegativity",
    "vdw_radius",
    "ionization_energy",
    "molar_volume",
    "atomic_number",
    "atomic_mass",
)
O_RADIUS = 1.40  # O2-, CN VI


@dataclass(frozen=True)
class IonRecord:
    ion: str
    element: str
    oxidation_state: float
    coordination: str
    values: tuple

    def __getitem__(self, prop: str) -> float:
        return self.values[PROPERTIES.index(prop)]


class IonPropertyTable:
    """Per-ion elemental properties keyed by ion label (e.g. ``"Ba2+"``)."""

    def __init__(self, records):
        self._records = {r.ion: r for r in records}

    @classmethod
    def from_csv(cls, path) -> "IonPropertyTable":
        with open(path, newline="", encoding="utf-8") as fh:
            return cls._parse(list(csv.DictReader(fh)), str(path))

    @classmethod
    def default(cls) -> "IonPropertyTable":
        text = resources.files("qal.descriptors").joinpath("ions.csv").read_text(encoding="utf-8")
        return cls._parse(list(csv.DictReader(text.splitlines())), "ions.csv")

    @classmethod
    def _parse(cls, rows, source) -> "IonPropertyTable":
        records = []
        for lineno, row in enumerate(rows, 2):
            try:
                values = tuple(float(row[p]) for p in PROPERTIES)
                rec = IonRecord(row["ion"], row["element"], float(row["oxidation_state"]),
                                row["coordination"], values)
            except (KeyError, ValueError, TypeError) as exc:
                raise DataError(f"{source}:{lineno}: bad ion record ({exc})") from None
            if not all(math.isfinite(v) and v > 0 for v in values):
                raise DataError(f"{source}:{lineno}: ion properties must be finite and positive")
            records.append(rec)
        return cls(records)

    def __contains__(self, ion: str) -> bool:
        return ion in self._records

    def __getitem__(self, ion: str) -> IonRecord:
        try:
            return self._records[ion]
        except KeyError:
            raise DataError(f"ion {ion!r} is not in the property table") from None

    def __iter__(self):
        return iter(self._records.values())

    def ions(self) -> list[str]:
        return list(self._records)


def _site(entries, table=None):
    out = []
    for e in entries:
        if len(e) == 2:
            if table is None:
                raise ValueError("oxidation state missing and no table given")
            ion, frac = e
            out.append((ion, float(frac), table[ion].oxidation_state))
        else:
            ion, frac, ox = e
            out.append((ion, float(frac), float(ox)))
    return tuple(out)


def _check_site(site, name):
    if not site:
        raise ValueError(f"site {name} is empty")
    fracs = [f for _, f, _ in site]
    if any(not 0.0 <= f <= 1.0 for f in fracs):
        raise ValueError(f"site {name} fractions must lie in [0, 1]")
    if abs(sum(fracs) - 1.0) > 1e-9:
        raise ValueError(f"site {name} fractions sum to {sum(fracs)!r}, not 1")


@dataclass(frozen=True)
class PerovskiteComposition:
    """``site_a``/``site_b`` hold ``(ion label, fraction, oxidation state)`` triples."""

    site_a: tuple
    site_b: tuple
    r_o: float = O_RADIUS

    def __post_init__(self):
        object.__setattr__(self, "site_a", _site(self.site_a))
        object.__setattr__(self, "site_b", _site(self.site_b))
        _check_site(self.site_a, "A")
        _check_site(self.site_b, "B")

    @classmethod
    def from_fractions(cls, site_a: dict, site_b: dict, table: IonPropertyTable | None = None):
        table = table or IonPropertyTable.default()
        return cls(_site(site_a.items(), table), _site(site_b.items(), table))


@dataclass(frozen=True)
class DoublePerovskiteComposition:
    a: tuple
    a_prime: tuple
    b: tuple
    b_prime: tuple

    def __post_init__(self):
        for name in ("a", "a_prime", "b", "b_prime"):
            site = _site(getattr(self, name))
            _check_site(site, name)
            object.__setattr__(self, name, site)

    @classmethod
    def from_fractions(cls, a: dict, a_prime: dict, b: dict, b_prime: dict, table=None):
        table = table or IonPropertyTable.default()
        return cls(*(_site(s.items(), table) for s in (a, a_prime, b, b_prime)))


def weighted_properties(site, table: IonPropertyTable) -> np.ndarray:
    """Fraction-weighted sum of the 8 ion properties over one site."""
    out = np.zeros(len(PROPERTIES))
    for ion, frac, _ in site:
        out += frac * np.asarray(table[ion].values)
    return out


def site_charge(site) -> float:
    return float(sum(frac * ox for _, frac, ox in site))


def tolerance_factors(rA_bar: float, rB_bar: float, rO: float, QA: float) -> tuple[float, float]:
    """Goldschmidt ``t_f`` and the ``t_new`` factor (singular when ``rA == rB``)."""
    if min(rA_bar, rB_bar, rO) <= 0:
        raise ValueError("radii must be positive")
    log_ratio = math.log(rA_bar / rB_bar)
    if abs(log_ratio) < 1e-12:
        raise ValueError("tolerance factor undefined: ln(rA/rB) = 0")
    t_f = (rA_bar + rO) / (math.sqrt(2.0) * (rB_bar + rO))
    t_new = rO / rB_bar - QA * (QA - (rA_bar / rB_bar) / log_ratio)
    return t_f, t_new


def _ratio(num: np.ndarray, den: np.ndarray, label: str) -> np.ndarray:
    if np.any(den == 0):
        raise DataError(f"zero {label} property in a ratio denominator")
    return num / den


def single_perovskite_descriptor(comp: PerovskiteComposition, table: IonPropertyTable | None = None) -> np.ndarray:
    table = table or IonPropertyTable.default()
    pa = weighted_properties(comp.site_a, table)
    pb = weighted_properties(comp.site_b, table)
    r = PROPERTIES.index("shannon_radius")
    t_f, t_new = tolerance_factors(pa[r], pb[r], comp.r_o, site_charge(comp.site_a))
    return np.concatenate([[t_f, t_new], pa, pb, _ratio(pa, pb, "B-site"), pa * pb])


def double_perovskite_descriptor(comp: DoublePerovskiteComposition,
                                 table: IonPropertyTable | None = None) -> np.ndarray:
    table = table or IonPropertyTable.default()
    pa, pa2, pb, pb2 = (weighted_properties(s, table) for s in (comp.a, comp.a_prime, comp.b, comp.b_prime))
    return np.concatenate([
        pa, pa2, pb, pb2,
        _ratio(pa, pb, "B-site"), _ratio(pa2, pb2, "B'-site"),
        pa * pb, pa2 * pb2,
    ])


def single_feature_names() -> list[str]:
    names = ["t_f", "t_new"]
    for prefix in ("A", "B", "A_over_B", "A_times_B"):
        names += [f"{prefix}_{p}" for p in PROPERTIES]
    return names


def double_feature_names() -> list[str]:
    names = []
    for prefix in ("A", "Ap", "B", "Bp", "A_over_B", "Ap_over_Bp", "A_times_B", "Ap_times_Bp"):
        names += [f"{prefix}_{p}" for p in PROPERTIES]
    return names


def parse_site(text: str, table: IonPropertyTable | None = None) -> tuple:
    """Parse ``"Ba2+:0.9;Ca2+:0.1"`` into site triples (oxidation from the table)."""
    table = table or IonPropertyTable.default()
    entries = []
    for part in text.split(";"):
        part = part.strip()
        if not part:
            continue
        ion, _, frac = part.partition(":")
        try:
            entries.append((ion.strip(), float(frac) if frac else 1.0))
        except ValueError:
            raise DataError(f"bad site entry {part!r}") from None
    return _site(entries, table)
