"""Atomic structures, XYZ parsing, spin and MBTR (k=2) descriptors."""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from itertools import combinations_with_replacement

import numpy as np

from ..errors import DataError


@dataclass(frozen=True)
class Structure:
    symbols: tuple
    positions: np.ndarray  # (n_atoms, 3), Angstrom
    multiplicity: int = 1
    comment: str = ""

    def __post_init__(self):
        pos = np.asarray(self.positions, dtype=float)
        object.__setattr__(self, "positions", pos)
        object.__setattr__(self, "symbols", tuple(self.symbols))
        if pos.ndim != 2 or pos.shape[1] != 3 or len(pos) != len(self.symbols):
            raise ValueError("positions must be (n_atoms, 3) matching the symbols")
        if not np.all(np.isfinite(pos)):
            raise ValueError("atomic coordinates must be finite")
        if int(self.multiplicity) != self.multiplicity or self.multiplicity < 1:
            raise ValueError("multiplicity must be a positive integer")

    @property
    def species(self) -> tuple:
        return tuple(sorted(set(self.symbols)))


_MULT = re.compile(r"multiplicity\s*=\s*(\S+)")
_ENERGY = re.compile(r"energy\s*=\s*(\S+)")


class XyzParseError(DataError):
    pass


def parse_xyz(text: str, source: str = "<string>") -> Structure:
    """Strict XYZ reader: count line, comment line, then ``El x y z`` rows.

    ``multiplicity=<int>`` in the comment sets the spin multiplicity (default 1).
    """
    lines = text.splitlines()
    if not lines:
        raise XyzParseError(f"{source}:1: empty file")
    try:
        n = int(lines[0].strip())
    except ValueError:
        raise XyzParseError(f"{source}:1: expected an atom count, got {lines[0]!r}") from None
    if n < 1:
        raise XyzParseError(f"{source}:1: atom count must be positive")
    if len(lines) < 2:
        raise XyzParseError(f"{source}:2: missing comment line")
    comment = lines[1]
    mult = 1
    m = _MULT.search(comment)
    if m:
        try:
            mult = int(m.group(1))
        except ValueError:
            raise XyzParseError(f"{source}:2: bad multiplicity {m.group(1)!r}") from None
        if mult < 1:
            raise XyzParseError(f"{source}:2: multiplicity must be >= 1")
    body = lines[2:]
    while body and not body[-1].strip():
        body.pop()
    if len(body) != n:
        raise XyzParseError(f"{source}:{len(lines) + 1}: expected {n} atom rows, found {len(body)}")
    symbols, coords = [], []
    for lineno, line in enumerate(body, 3):
        parts = line.split()
        if len(parts) != 4:
            raise XyzParseError(f"{source}:{lineno}: expected 'El x y z', got {line!r}")
        if not parts[0].isalpha():
            raise XyzParseError(f"{source}:{lineno}: bad element symbol {parts[0]!r}")
        try:
            xyz = [float(v) for v in parts[1:]]
        except ValueError:
            raise XyzParseError(f"{source}:{lineno}: non-numeric coordinate in {line!r}") from None
        if not all(math.isfinite(v) for v in xyz):
            raise XyzParseError(f"{source}:{lineno}: non-finite coordinate")
        symbols.append(parts[0])
        coords.append(xyz)
    return Structure(tuple(symbols), np.array(coords), mult, comment)


def read_xyz(path) -> Structure:
    with open(path, encoding="utf-8") as fh:
        return parse_xyz(fh.read(), str(path))


def comment_energy(structure: Structure) -> float | None:
    m = _ENERGY.search(structure.comment)
    return float(m.group(1)) if m else None


def format_xyz(structure: Structure) -> str:
    lines = [str(len(structure.symbols)), structure.comment or f"multiplicity={structure.multiplicity}"]
    for sym, (x, y, z) in zip(structure.symbols, structure.positions):
        lines.append(f"{sym} {float(x)!r} {float(y)!r} {float(z)!r}")
    return "\n".join(lines) + "\n"


def spin_descriptor(multiplicity: int) -> np.ndarray:
    """``[2S+1, S, 2 sqrt(S(S+1)), n_unpaired]`` for a spin multiplicity ``2S+1``."""
    if int(multiplicity) != multiplicity or multiplicity < 1:
        raise ValueError("multiplicity must be an integer >= 1")
    S = (multiplicity - 1) / 2.0
    return np.array([float(multiplicity), S, 2.0 * math.sqrt(S * (S + 1.0)), float(multiplicity - 1)])


@dataclass(frozen=True)
class MbtrGrid:
    min: float = 0.0
    max: float = 1.0
    n_bins: int = 100
    sigma: float = 0.02

    def __post_init__(self):
        if not self.max > self.min:
            raise ValueError("MBTR grid range is empty")
        if self.n_bins < 2:
            raise ValueError("MBTR grid needs at least 2 bins")
        if not self.sigma > 0:
            raise ValueError("MBTR sigma must be positive")

    @property
    def centers(self) -> np.ndarray:
        return np.linspace(self.min, self.max, self.n_bins)


def mbtr_channels(species) -> list[tuple[str, str]]:
    return list(combinations_with_replacement(sorted(set(species)), 2))


def mbtr_k2(structure: Structure, grid: MbtrGrid | None = None, species=None) -> np.ndarray:
    """Two-body MBTR with inverse-distance geometry and Gaussian broadening.

    Each unordered atom pair adds ``N(c; 1/d, sigma)`` evaluated at the bin
    centers ``c`` of its element-pair channel. Channels are the sorted pairs of
    ``species`` (default: the structure's own species), concatenated in order.
    """
    grid = grid or MbtrGrid()
    if len(structure.symbols) < 2:
        raise ValueError("MBTR needs at least two atoms")
    species = structure.species if species is None else tuple(sorted(set(species)))
    missing = set(structure.symbols) - set(species)
    if missing:
        raise ValueError(f"species {sorted(missing)} not covered by the channel list")
    channels = {ch: k for k, ch in enumerate(mbtr_channels(species))}
    centers = grid.centers
    out = np.zeros((len(channels), grid.n_bins))
    pos = structure.positions
    norm = 1.0 / (grid.sigma * math.sqrt(2.0 * math.pi))
    for i in range(len(pos)):
        for j in range(i + 1, len(pos)):
            d = float(np.linalg.norm(pos[i] - pos[j]))
            if d < 1e-6:
                raise ValueError(f"atoms {i} and {j} coincide")
            g = 1.0 / d
            ch = tuple(sorted((structure.symbols[i], structure.symbols[j])))
            out[channels[ch]] += norm * np.exp(-0.5 * ((centers - g) / grid.sigma) ** 2)
    return out.ravel()


def mbtr_feature_names(species, grid: MbtrGrid) -> list[str]:
    return [f"mbtr_{a}-{b}_{k}" for a, b in mbtr_channels(species) for k in range(grid.n_bins)]
