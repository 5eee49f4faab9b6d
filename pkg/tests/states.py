"""Hand-built fixture states used across the test modules."""

import numpy as np

from fracstab.cliffords import CNOT, CZ, H_FIRST
from fracstab.dense import DenseState
from fracstab.tableau import StabilizerTableau


def bell_pair(n_qubits=2, a=0, b=1) -> StabilizerTableau:
    state = StabilizerTableau.new_product_state(n_qubits)
    state.apply_clifford2(H_FIRST, a, b)
    state.apply_clifford2(CNOT, a, b)
    return state


def ghz(n_qubits: int) -> StabilizerTableau:
    state = StabilizerTableau.new_product_state(n_qubits)
    state.apply_clifford2(H_FIRST, 0, 1)
    for q in range(1, n_qubits):
        state.apply_clifford2(CNOT, 0, q)
    return state


def ring_cluster_state(n_qubits: int) -> StabilizerTableau:
    """Graph state on a cycle; for n=5 every qubit pair is uncorrelated
    (any two vertices see different neighborhoods) yet the ring is one
    entangled cluster."""
    state = StabilizerTableau.new_product_state(n_qubits)
    for q in range(n_qubits):
        state.apply_clifford2(H_FIRST, q, (q + 1) % n_qubits)
    for q in range(n_qubits):
        state.apply_clifford2(CZ, q, (q + 1) % n_qubits)
    return state


def random_circuit_state(n_qubits: int, n_gates: int, p_measure: float,
                         rng: np.random.Generator) -> StabilizerTableau:
    from fracstab.cliffords import sample_two_qubit_clifford

    state = StabilizerTableau.new_product_state(n_qubits)
    for _ in range(n_gates):
        i, j = rng.choice(n_qubits, size=2, replace=False)
        state.apply_clifford2(sample_two_qubit_clifford(rng), int(i), int(j))
        if rng.random() < p_measure:
            state.measure_z(int(rng.integers(n_qubits)), rng)
    return state


def dense_bell(n_qubits=2, a=0, b=1) -> DenseState:
    state = DenseState.product_state(n_qubits)
    from fracstab.dense import clifford_to_unitary

    state.apply_two_qubit(clifford_to_unitary(H_FIRST), a, b)
    state.apply_two_qubit(clifford_to_unitary(CNOT), a, b)
    return state
