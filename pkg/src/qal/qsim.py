"""Noise-free statevector simulation and data-encoding feature maps.

Conventions
-----------
* Qubit 0 is the least-significant bit of the amplitude index, so the basis
  state ``|q_{n-1} ... q_1 q_0>`` lives at index ``sum(q_k << k)``.
* ``P(theta) = diag(1, exp(i theta))`` and ``RZ(theta) = diag(exp(-i theta/2),
  exp(i theta/2))``; ``CX(c, t)`` flips qubit ``t`` when qubit ``c`` is 1.
* Statevectors are plain complex ``numpy`` arrays of length ``2**n``; a batch of
  states is a ``(m, 2**n)`` array.

Gate sequences per repetition (``reps`` stacks the layer below):

``Z``        H on every qubit, then ``P(2 x_q)`` on qubit ``q``.
``ZZ``       the Z layer, then for each entangled pair ``(i, j)``:
             ``CX(i, j); P(2 (pi - x_i)(pi - x_j)) on j; CX(i, j)``.
``Pauli``    H on every qubit, then one evolution block per Pauli string and
             qubit block. Single-qubit strings use ``phi = x_q``, multi-qubit
             strings ``phi = prod(pi - x_k)``. A block changes basis (X: H,
             Y: RX(pi/2)), runs a CX ladder onto its last qubit, applies
             ``P(2 phi)`` there and undoes the ladder and basis change.
             The default strings ``("Z", "ZZ")`` reproduce ``ZZ`` exactly.
``HighDim``  an RY layer and an RZ layer whose angles walk through the input
             features cyclically (a single counter over the whole circuit),
             then a linear ``CX(q, q+1)`` chain.
``YZ_CX``    ``RY(x_q)`` then ``RZ(x_q)`` on every qubit, then the linear chain.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

FAMILIES = ("Z", "ZZ", "Pauli", "HighDim", "YZ_CX")
ENTANGLEMENTS = ("none", "full", "circular", "linear")
GATE_NAMES = ("H", "RX", "RY", "RZ", "P", "CX")
MAX_QUBITS = 20

_DEFAULT_ENTANGLEMENT = {
    "Z": "none",
    "ZZ": "full",
    "Pauli": "full",
    "HighDim": "linear",
    "YZ_CX": "linear",
}
_ALLOWED_ENTANGLEMENT = {
    "Z": {"none"},
    "ZZ": {"full", "circular"},
    "Pauli": {"full", "circular"},
    "HighDim": {"linear"},
    "YZ_CX": {"linear"},
}
_SQRT1_2 = 1.0 / math.sqrt(2.0)


@dataclass(frozen=True)
class Gate:
    """One circuit instruction. ``angle`` may be an array for batched circuits."""

    name: str
    qubits: tuple[int, ...]
    angle: float | np.ndarray | None = None

    def inverse(self) -> "Gate":
        if self.name in ("H", "CX"):
            return self
        return Gate(self.name, self.qubits, -self.angle)


@dataclass(frozen=True)
class FeatureMapSpec:
    family: str
    n_qubits: int
    reps: int
    entanglement: str
    pauli_strings: tuple[str, ...] = field(default=())

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown feature-map family {self.family!r}; expected one of {FAMILIES}")
        if int(self.n_qubits) != self.n_qubits or self.n_qubits < 1:
            raise ValueError(f"n_qubits must be a positive integer, got {self.n_qubits!r}")
        if self.n_qubits > MAX_QUBITS:
            raise ValueError(f"n_qubits={self.n_qubits} exceeds the supported maximum of {MAX_QUBITS}")
        if int(self.reps) != self.reps or self.reps < 1:
            raise ValueError(f"reps must be a positive integer, got {self.reps!r}")
        if self.entanglement not in _ALLOWED_ENTANGLEMENT[self.family]:
            allowed = sorted(_ALLOWED_ENTANGLEMENT[self.family])
            raise ValueError(
                f"family {self.family} does not support entanglement {self.entanglement!r} (allowed: {allowed})"
            )
        if self.family == "Pauli":
            if not self.pauli_strings:
                raise ValueError("Pauli family needs at least one Pauli string")
            for label in self.pauli_strings:
                if not label or set(label) - set("XYZ"):
                    raise ValueError(f"invalid Pauli string {label!r}")
        elif self.pauli_strings:
            raise ValueError("pauli_strings only apply to the Pauli family")

    @property
    def dim(self) -> int:
        return 1 << self.n_qubits

    def digest(self) -> str:
        """Short stable hash used in kernel provenance."""
        text = f"{self.family}|{self.n_qubits}|{self.reps}|{self.entanglement}|{','.join(self.pauli_strings)}"
        return hashlib.sha256(text.encode()).hexdigest()[:16]


def build_feature_map(
    family: str,
    n_qubits: int,
    reps: int,
    entanglement: str | None = None,
    pauli_strings=None,
) -> FeatureMapSpec:
    """Validate parameters and return a :class:`FeatureMapSpec`.

    ``entanglement=None`` picks the family default (none / full / linear).
    """
    if family not in FAMILIES:
        raise ValueError(f"unknown feature-map family {family!r}; expected one of {FAMILIES}")
    if entanglement is None:
        entanglement = _DEFAULT_ENTANGLEMENT[family]
    if family == "Pauli":
        pauli_strings = tuple(pauli_strings) if pauli_strings else ("Z", "ZZ")
    else:
        pauli_strings = tuple(pauli_strings or ())
    return FeatureMapSpec(family, int(n_qubits), int(reps), entanglement, pauli_strings)


def entangling_blocks(n_qubits: int, size: int, entanglement: str) -> list[tuple[int, ...]]:
    """Qubit tuples of length ``size`` visited by one entangling layer."""
    if size == 1:
        return [(q,) for q in range(n_qubits)]
    if size > n_qubits:
        return []
    if entanglement == "full":
        return list(combinations(range(n_qubits), size))
    linear = [tuple(range(i, i + size)) for i in range(n_qubits - size + 1)]
    if entanglement == "linear":
        return linear
    if entanglement == "circular":
        if n_qubits > size:
            return [tuple(range(n_qubits - size + 1, n_qubits)) + (0,)] + linear
        return linear
    raise ValueError(f"no entangling blocks for entanglement {entanglement!r}")


def _check_input(spec: FeatureMapSpec, x: np.ndarray) -> None:
    d = x.shape[-1]
    if spec.family == "HighDim":
        if d < 1:
            raise ValueError("HighDim encoding needs at least one feature")
    elif d != spec.n_qubits:
        raise ValueError(f"{spec.family} feature map on {spec.n_qubits} qubits needs {spec.n_qubits} features, got {d}")
    if not np.all(np.isfinite(x)):
        raise ValueError("input vector contains non-finite values")


def _rep_gates(spec: FeatureMapSpec, cols, rep: int) -> list[Gate]:
    # `cols[k]` is the k-th feature: a float or a per-row array.
    n = spec.n_qubits
    gates: list[Gate] = []
    if spec.family in ("Z", "ZZ"):
        gates += [Gate("H", (q,)) for q in range(n)]
        gates += [Gate("P", (q,), 2.0 * cols[q]) for q in range(n)]
        if spec.family == "ZZ":
            for i, j in entangling_blocks(n, 2, spec.entanglement):
                angle = 2.0 * (math.pi - cols[i]) * (math.pi - cols[j])
                gates += [Gate("CX", (i, j)), Gate("P", (j,), angle), Gate("CX", (i, j))]
    elif spec.family == "Pauli":
        gates += [Gate("H", (q,)) for q in range(n)]
        for label in spec.pauli_strings:
            for block in entangling_blocks(n, len(label), spec.entanglement):
                gates += _pauli_evolution(label, block, cols)
    elif spec.family == "HighDim":
        d = len(cols)
        offset = rep * 2 * n
        gates += [Gate("RY", (q,), cols[(offset + q) % d]) for q in range(n)]
        gates += [Gate("RZ", (q,), cols[(offset + n + q) % d]) for q in range(n)]
        gates += [Gate("CX", (q, q + 1)) for q in range(n - 1)]
    else:  # YZ_CX
        for q in range(n):
            gates += [Gate("RY", (q,), cols[q]), Gate("RZ", (q,), cols[q])]
        gates += [Gate("CX", (q, q + 1)) for q in range(n - 1)]
    return gates


def _pauli_evolution(label: str, block: tuple[int, ...], cols) -> list[Gate]:
    if len(block) == 1:
        phi = cols[block[0]]
    else:
        phi = 1.0
        for q in block:
            phi = phi * (math.pi - cols[q])
    basis = []
    for p, q in zip(label, block):
        if p == "X":
            basis.append(Gate("H", (q,)))
        elif p == "Y":
            basis.append(Gate("RX", (q,), math.pi / 2))
    ladder = [Gate("CX", (block[k], block[k + 1])) for k in range(len(block) - 1)]
    core = [Gate("P", (block[-1],), 2.0 * phi)]
    return basis + ladder + core + ladder[::-1] + [g.inverse() for g in reversed(basis)]


def feature_map_gates(spec: FeatureMapSpec, x, rep: int | None = None) -> list[Gate]:
    """Gate list of ``U(x)`` (or of repetition ``rep`` only)."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise ValueError("expected a 1-D input vector")
    _check_input(spec, x)
    cols = [float(v) for v in x]
    if rep is not None:
        return _rep_gates(spec, cols, rep)
    gates: list[Gate] = []
    for r in range(spec.reps):
        gates += _rep_gates(spec, cols, r)
    return gates


def inverse_gates(gates: list[Gate]) -> list[Gate]:
    return [g.inverse() for g in reversed(gates)]


def zero_state(n_qubits: int, batch: int | None = None) -> np.ndarray:
    if not 1 <= n_qubits <= MAX_QUBITS:
        raise ValueError(f"n_qubits must be in [1, {MAX_QUBITS}]")
    shape = (1 << n_qubits,) if batch is None else (batch, 1 << n_qubits)
    state = np.zeros(shape, dtype=complex)
    state[..., 0] = 1.0
    return state


def _one_qubit_matrix(name: str, angle):
    # Entries are scalars or (m, 1, 1) arrays for batched angles.
    if name == "H":
        return _SQRT1_2, _SQRT1_2, _SQRT1_2, -_SQRT1_2
    if name == "P":
        return 1.0, 0.0, 0.0, np.exp(1j * angle)
    c, s = np.cos(angle / 2.0), np.sin(angle / 2.0)
    if name == "RX":
        return c, -1j * s, -1j * s, c
    if name == "RY":
        return c, -s, s, c
    if name == "RZ":
        return np.exp(-0.5j * angle), 0.0, 0.0, np.exp(0.5j * angle)
    raise ValueError(f"unknown gate {name!r}")


def _apply_batch(states: np.ndarray, gate: Gate, n: int) -> np.ndarray:
    m = states.shape[0]
    if gate.name == "CX":
        c, t = gate.qubits
        view = states.reshape((m,) + (2,) * n)
        out = view.copy()
        ac, at = n - c, n - t  # tensor axis of each qubit (axis 0 is the batch)
        src = [slice(None)] * (n + 1)
        dst = [slice(None)] * (n + 1)
        src[ac] = dst[ac] = 1
        src[at], dst[at] = 1, 0
        out[tuple(dst)] = view[tuple(src)]
        src[at], dst[at] = 0, 1
        out[tuple(dst)] = view[tuple(src)]
        return out.reshape(m, -1)
    (q,) = gate.qubits
    angle = gate.angle
    if angle is not None and np.ndim(angle) > 0:
        angle = np.asarray(angle, dtype=float).reshape(m, 1, 1)
    a, b, c_, d = _one_qubit_matrix(gate.name, angle)
    view = states.reshape(m, -1, 2, 1 << q)
    s0, s1 = view[:, :, 0, :], view[:, :, 1, :]
    out = np.empty_like(view)
    out[:, :, 0, :] = a * s0 + b * s1
    out[:, :, 1, :] = c_ * s0 + d * s1
    return out.reshape(m, -1)


def _check_gate(gate: Gate, n: int) -> None:
    if gate.name not in GATE_NAMES:
        raise ValueError(f"unknown gate {gate.name!r}")
    arity = 2 if gate.name == "CX" else 1
    if len(gate.qubits) != arity:
        raise ValueError(f"{gate.name} acts on {arity} qubit(s), got {gate.qubits}")
    for q in gate.qubits:
        if not 0 <= q < n:
            raise ValueError(f"qubit index {q} out of range for {n} qubits")
    if gate.name == "CX" and gate.qubits[0] == gate.qubits[1]:
        raise ValueError("CX control and target must differ")
    if gate.name in ("RX", "RY", "RZ", "P") and gate.angle is None:
        raise ValueError(f"{gate.name} needs an angle")


def _n_qubits_of(dim: int) -> int:
    n = dim.bit_length() - 1
    if dim < 2 or 1 << n != dim:
        raise ValueError(f"state dimension {dim} is not a power of two")
    return n


def apply_gate(state: np.ndarray, gate: Gate) -> np.ndarray:
    """Return ``gate |state>`` as a new array (input is not modified)."""
    state = np.asarray(state, dtype=complex)
    n = _n_qubits_of(state.shape[-1])
    _check_gate(gate, n)
    if state.ndim == 1:
        return _apply_batch(state[None, :], gate, n)[0]
    return _apply_batch(state, gate, n)


def run_gates(state: np.ndarray, gates) -> np.ndarray:
    for g in gates:
        state = apply_gate(state, g)
    return state


def encode_states(spec: FeatureMapSpec, X) -> np.ndarray:
    """Encode every row of ``X``; returns a ``(m, 2**n)`` array of ``U(x)|0>``."""
    X = np.asarray(X, dtype=float)
    if X.ndim != 2:
        raise ValueError("expected a 2-D array of input rows")
    _check_input(spec, X)
    m, n = X.shape[0], spec.n_qubits
    states = zero_state(n, batch=m)
    if m == 0:
        return states
    cols = [X[:, k].copy() for k in range(X.shape[1])]
    for r in range(spec.reps):
        for g in _rep_gates(spec, cols, r):
            states = _apply_batch(states, g, n)
    return states


def encode_state(spec: FeatureMapSpec, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise ValueError("expected a 1-D input vector")
    return encode_states(spec, x[None, :])[0]


def overlap(a: np.ndarray, b: np.ndarray) -> complex:
    """Inner product ``<a|b>``."""
    a, b = np.asarray(a), np.asarray(b)
    if a.shape != b.shape or a.ndim != 1:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return complex(np.vdot(a, b))


def reduced_density_matrix(state: np.ndarray, k: int) -> np.ndarray:
    """One-qubit reduced density matrix of qubit ``k`` (partial trace over the rest)."""
    state = np.asarray(state, dtype=complex)
    n = _n_qubits_of(state.shape[-1])
    if not 0 <= k < n:
        raise ValueError(f"qubit index {k} out of range for {n} qubits")
    psi = state.reshape(-1, 2, 1 << k)
    return np.einsum("aib,ajb->ij", psi, psi.conj())


_PAULIS = (
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)


def is_density_matrix(rho: np.ndarray, atol: float = 1e-10) -> bool:
    rho = np.asarray(rho)
    if rho.shape != (2, 2):
        return False
    if abs(np.trace(rho) - 1.0) > atol or not np.allclose(rho, rho.conj().T, atol=atol):
        return False
    w = np.linalg.eigvalsh((rho + rho.conj().T) / 2)
    return bool(w.min() >= -atol and w.max() <= 1 + atol)


def bloch_components(rho: np.ndarray) -> tuple[float, float, float]:
    """``(tr[X rho], tr[Y rho], tr[Z rho])`` of a one-qubit density matrix."""
    rho = np.asarray(rho, dtype=complex)
    if not is_density_matrix(rho):
        raise ValueError("not a valid one-qubit density matrix")
    return tuple(float(np.trace(p @ rho).real) for p in _PAULIS)


def bloch_vectors(states: np.ndarray) -> np.ndarray:
    """Batched Bloch vectors: ``(m, n_qubits, 3)`` for a ``(m, 2**n)`` batch."""
    states = np.asarray(states, dtype=complex)
    m = states.shape[0]
    n = _n_qubits_of(states.shape[1])
    out = np.empty((m, n, 3))
    for k in range(n):
        psi = states.reshape(m, -1, 2, 1 << k)
        r01 = np.einsum("mab,mab->m", psi[:, :, 0, :], psi[:, :, 1, :].conj())
        p0 = np.einsum("mab,mab->m", psi[:, :, 0, :], psi[:, :, 0, :].conj()).real
        p1 = np.einsum("mab,mab->m", psi[:, :, 1, :], psi[:, :, 1, :].conj()).real
        # rho = [[p0, r01], [r01*, p1]]
        out[:, k, 0] = 2.0 * r01.real
        out[:, k, 1] = -2.0 * r01.imag
        out[:, k, 2] = p0 - p1
    return out


def gates_to_text(gates) -> str:
    """Line format ``GATE q[,q2] [angle]`` (angles as round-trip float reprs)."""
    lines = []
    for g in gates:
        line = f"{g.name} {','.join(str(q) for q in g.qubits)}"
        if g.angle is not None:
            line += f" {float(g.angle)!r}"
        lines.append(line)
    return "\n".join(lines) + ("\n" if lines else "")


def gates_from_text(text: str) -> list[Gate]:
    gates = []
    for lineno, line in enumerate(text.splitlines(), 1):
        parts = line.split()
        if not parts:
            continue
        if len(parts) not in (2, 3) or parts[0] not in GATE_NAMES:
            raise ValueError(f"line {lineno}: cannot parse gate {line!r}")
        qubits = tuple(int(q) for q in parts[1].split(","))
        angle = float(parts[2]) if len(parts) == 3 else None
        if (angle is None) != (parts[0] in ("H", "CX")):
            raise ValueError(f"line {lineno}: wrong number of fields for {parts[0]}")
        gates.append(Gate(parts[0], qubits, angle))
    return gates
