import math

import numpy as np
import pytest

from qal.qsim import (
    FAMILIES,
    Gate,
    apply_gate,
    bloch_components,
    bloch_vectors,
    build_feature_map,
    encode_state,
    encode_states,
    entangling_blocks,
    feature_map_gates,
    gates_from_text,
    gates_to_text,
    inverse_gates,
    is_density_matrix,
    overlap,
    reduced_density_matrix,
    run_gates,
    zero_state,
)

S2 = 1 / math.sqrt(2)


def basis(n, index):
    v = np.zeros(1 << n, dtype=complex)
    v[index] = 1
    return v


# --- build_feature_map ---

def test_z_map_has_no_two_qubit_gates():
    spec = build_feature_map("Z", 7, 5)
    assert (spec.n_qubits, spec.reps, spec.entanglement) == (7, 5, "none")
    gates = feature_map_gates(spec, np.linspace(0, 1, 7))
    assert not any(g.name == "CX" for g in gates)


def test_zz_full_has_28_pairs_per_rep():
    spec = build_feature_map("ZZ", 8, 5, "full")
    assert len(entangling_blocks(8, 2, "full")) == 28
    gates = feature_map_gates(spec, np.zeros(8), rep=0)
    assert sum(g.name == "CX" for g in gates) == 2 * 28


def test_highdim_spec():
    spec = build_feature_map("HighDim", 4, 4, "linear")
    assert (spec.n_qubits, spec.reps) == (4, 4)


def test_circular_blocks_wrap():
    assert entangling_blocks(4, 2, "circular") == [(3, 0), (0, 1), (1, 2), (2, 3)]
    assert entangling_blocks(4, 2, "linear") == [(0, 1), (1, 2), (2, 3)]


@pytest.mark.parametrize("family,ent", [("Z", "full"), ("ZZ", "none"), ("HighDim", "full"), ("YZ_CX", "circular")])
def test_incompatible_entanglement(family, ent):
    with pytest.raises(ValueError):
        build_feature_map(family, 3, 1, ent)


@pytest.mark.parametrize("n,reps", [(0, 1), (2, 0), (21, 1)])
def test_bad_sizes(n, reps):
    with pytest.raises(ValueError):
        build_feature_map("Z", n, reps)


def test_pauli_default_equals_zz():
    x = np.array([0.3, -1.1, 0.7])
    zz = encode_state(build_feature_map("ZZ", 3, 2, "full"), x)
    pauli = encode_state(build_feature_map("Pauli", 3, 2, "full"), x)
    assert np.allclose(zz, pauli, atol=1e-12)


def test_pauli_strings_validated():
    with pytest.raises(ValueError):
        build_feature_map("Pauli", 2, 1, pauli_strings=["ZA"])
    with pytest.raises(ValueError):
        build_feature_map("Z", 2, 1, pauli_strings=["Z"])


def test_digest_stable_and_distinct():
    a = build_feature_map("ZZ", 3, 2)
    assert a.digest() == build_feature_map("ZZ", 3, 2).digest()
    assert a.digest() != build_feature_map("ZZ", 3, 3).digest()


# --- encode_state ---

def test_z_one_qubit_zero_input():
    psi = encode_state(build_feature_map("Z", 1, 1), [0.0])
    assert np.allclose(psi, [S2, S2], atol=1e-15)


def test_encode_dimension_mismatch():
    with pytest.raises(ValueError):
        encode_state(build_feature_map("Z", 3, 1), [0.1, 0.2])


def test_encode_non_finite():
    with pytest.raises(ValueError):
        encode_state(build_feature_map("Z", 2, 1), [0.1, np.nan])


def test_highdim_accepts_any_length():
    spec = build_feature_map("HighDim", 3, 2)
    for d in (1, 3, 7):
        psi = encode_state(spec, np.linspace(0.1, 1, d))
        assert abs(np.linalg.norm(psi) - 1) < 1e-12


def test_encode_deterministic():
    spec = build_feature_map("ZZ", 2, 2)
    x = np.array([0.4, 1.3])
    assert np.array_equal(encode_state(spec, x), encode_state(spec, x.copy()))


def test_batch_matches_single():
    spec = build_feature_map("Pauli", 3, 2, "circular", ["Z", "XY"])
    X = np.random.default_rng(0).normal(size=(5, 3))
    batch = encode_states(spec, X)
    for row, psi in zip(X, batch):
        assert np.array_equal(encode_state(spec, row), psi)


# --- apply_gate ---

def test_h_on_zero():
    assert np.allclose(apply_gate(zero_state(1), Gate("H", (0,))), [S2, S2])


def test_cx_control_is_qubit_zero():
    # |10> in the ket ordering q1 q0 has q0 = 0; we want q0 = 1 as the control
    state = basis(2, 0b01)  # q0 = 1, q1 = 0
    out = apply_gate(state, Gate("CX", (0, 1)))
    assert np.allclose(out, basis(2, 0b11))


def test_rz_inverse():
    psi = encode_state(build_feature_map("ZZ", 2, 1), [0.3, 0.9])
    out = apply_gate(apply_gate(psi, Gate("RZ", (1,), 0.7)), Gate("RZ", (1,), -0.7))
    assert np.allclose(out, psi, atol=1e-14)


def test_apply_gate_does_not_mutate():
    psi = zero_state(2)
    before = psi.copy()
    apply_gate(psi, Gate("H", (1,)))
    assert np.array_equal(psi, before)


@pytest.mark.parametrize("gate", [Gate("H", (2,)), Gate("CX", (1, 1)), Gate("RX", (0,), None), Gate("SWAP", (0, 1))])
def test_bad_gates(gate):
    with pytest.raises(ValueError):
        apply_gate(zero_state(2), gate)


def test_gate_acts_locally():
    rng = np.random.default_rng(3)
    a = rng.normal(size=2) + 1j * rng.normal(size=2)
    a /= np.linalg.norm(a)
    state = np.kron(a, np.array([1, 0], dtype=complex))  # q1 = a, q0 = |0>
    out = apply_gate(state, Gate("H", (0,)))
    assert np.allclose(out, np.kron(a, [S2, S2]))


def test_inverse_restores_input():
    spec = build_feature_map("HighDim", 3, 2)
    gates = feature_map_gates(spec, [0.2, 0.5, -0.4, 1.0])
    psi = run_gates(zero_state(3), gates)
    back = run_gates(psi, inverse_gates(gates))
    assert np.allclose(back, zero_state(3), atol=1e-12)


# --- overlap ---

def test_overlap_cases():
    psi = encode_state(build_feature_map("ZZ", 2, 2), [0.1, 0.2])
    assert abs(overlap(psi, psi) - 1) < 1e-12
    assert overlap(basis(1, 0), basis(1, 1)) == 0
    plus = apply_gate(zero_state(1), Gate("H", (0,)))
    assert abs(overlap(plus, zero_state(1)) - S2) < 1e-15


def test_overlap_dimension_mismatch():
    with pytest.raises(ValueError):
        overlap(zero_state(1), zero_state(2))


# --- reduced density matrices and Bloch components ---

def test_product_state_rdm():
    plus = np.array([S2, S2], dtype=complex)
    state = np.kron(plus, [1, 0])  # q0 = |0>, q1 = |+>
    rho1 = reduced_density_matrix(state, 1)
    rho0 = reduced_density_matrix(state, 0)
    assert np.allclose(rho1, np.outer(plus, plus.conj()), atol=1e-12)
    assert np.allclose(rho0, [[1, 0], [0, 0]], atol=1e-12)


def test_bell_state_rdm():
    bell = (basis(2, 0) + basis(2, 3)) / math.sqrt(2)
    for k in (0, 1):
        assert np.allclose(reduced_density_matrix(bell, k), np.eye(2) / 2, atol=1e-12)


def test_rdm_index_error():
    with pytest.raises(ValueError):
        reduced_density_matrix(zero_state(2), 2)


def test_bloch_components():
    assert np.allclose(bloch_components(np.array([[1, 0], [0, 0]], dtype=complex)), (0, 0, 1))
    assert np.allclose(bloch_components(np.eye(2) / 2), (0, 0, 0))
    assert np.allclose(bloch_components(np.full((2, 2), 0.5)), (1, 0, 0))


def test_bloch_vectors_match_rdms():
    spec = build_feature_map("YZ_CX", 3, 2)
    states = encode_states(spec, np.random.default_rng(1).normal(size=(4, 3)))
    vecs = bloch_vectors(states)
    for s, v in zip(states, vecs):
        for k in range(3):
            rho = reduced_density_matrix(s, k)
            assert is_density_matrix(rho)
            assert np.allclose(bloch_components(rho), v[k], atol=1e-12)


# --- text export ---

def test_gate_text_round_trip():
    gates = feature_map_gates(build_feature_map("ZZ", 3, 1), [0.1, 0.2, 0.3])
    text = gates_to_text(gates)
    assert text.splitlines()[0].startswith("H 0")
    again = gates_from_text(text)
    assert [(g.name, g.qubits) for g in again] == [(g.name, g.qubits) for g in gates]
    assert all((a.angle is None and b.angle is None) or a.angle == b.angle for a, b in zip(again, gates))


def test_gate_text_errors():
    with pytest.raises(ValueError):
        gates_from_text("FOO 0\n")
    with pytest.raises(ValueError):
        gates_from_text("RX 0\n")


@pytest.mark.parametrize("family", FAMILIES)
def test_every_family_normalized(family):
    spec = build_feature_map(family, 3, 2)
    psi = encode_state(spec, [0.3, -0.2, 1.5])
    assert abs(np.linalg.norm(psi) - 1) < 1e-12
