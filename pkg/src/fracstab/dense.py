"""Brute-force statevector oracle for small registers.

Everything here is deliberately independent of the tableau machinery: gates
are dense 4x4 unitaries rebuilt from elementary-gate words, entropies come
from Schmidt spectra of the reshaped amplitude tensor, and measurements
follow the Born rule. Used only to cross-validate the GF(2) fast path.

Qubit 0 is the most significant bit of the amplitude index.
"""

from __future__ import annotations

import numpy as np

from .cliffords import GENERATOR_NAMES, TwoQubitClifford, group_table
from .tableau import MeasurementOutcome, StabilizerTableau, _as_qubit_array

MAX_QUBITS = 10

_H = np.array([[1, 1], [1, -1]], dtype=np.complex128) / np.sqrt(2)
_S = np.diag([1, 1j]).astype(np.complex128)
_I2 = np.eye(2, dtype=np.complex128)
_CNOT = np.array([
    [1, 0, 0, 0],
    [0, 1, 0, 0],
    [0, 0, 0, 1],
    [0, 0, 1, 0],
], dtype=np.complex128)

# Order matches cliffords.GENERATOR_NAMES; the gate's first qubit is the
# first tensor factor.
_ELEMENTARY_UNITARIES = {
    "h_first": np.kron(_H, _I2),
    "h_second": np.kron(_I2, _H),
    "s_first": np.kron(_S, _I2),
    "s_second": np.kron(_I2, _S),
    "cnot": _CNOT,
}

_PAULI_1 = {
    0: _I2,
    1: np.array([[0, 1], [1, 0]], dtype=np.complex128),
    2: np.array([[1, 0], [0, -1]], dtype=np.complex128),
    3: np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
}


def two_qubit_pauli(coords: int) -> np.ndarray:
    """Dense matrix of the packed two-qubit Pauli (first site = low bits)."""
    return np.kron(_PAULI_1[coords & 3], _PAULI_1[(coords >> 2) & 3])


def clifford_to_unitary(gate: TwoQubitClifford) -> np.ndarray:
    """4x4 unitary realizing the gate's conjugation action (up to phase)."""
    table = group_table()
    word = table.word(table.id_of(gate))
    u = np.eye(4, dtype=np.complex128)
    for gi in word:
        u = _ELEMENTARY_UNITARIES[GENERATOR_NAMES[gi]] @ u
    return u


def verify_clifford_unitary(gate: TwoQubitClifford, u: np.ndarray,
                            atol: float = 1e-10) -> None:
    """Assert that conjugation by u reproduces the gate's Pauli images."""
    for k in range(4):
        src = two_qubit_pauli(1 << k)
        img = two_qubit_pauli(int(gate.images[k]))
        sign = -1.0 if gate.sign_flips[k] else 1.0
        got = u @ src @ u.conj().T
        if not np.allclose(got, sign * img, atol=atol):
            raise AssertionError(f"generator {k} image mismatch")


class DenseState:
    """A normalized amplitude vector over 2^n basis states."""

    __slots__ = ("n", "amplitudes")

    def __init__(self, n: int, amplitudes: np.ndarray):
        if n > MAX_QUBITS:
            raise ValueError(f"dense oracle capped at {MAX_QUBITS} qubits")
        self.n = n
        self.amplitudes = amplitudes

    @classmethod
    def product_state(cls, n_qubits: int) -> "DenseState":
        """|00...0>."""
        if n_qubits < 1:
            raise ValueError("need at least one qubit")
        amp = np.zeros(2 ** n_qubits, dtype=np.complex128)
        amp[0] = 1.0
        return cls(n_qubits, amp)

    @classmethod
    def from_tableau(cls, state: StabilizerTableau, seed: int = 0x5EED) -> "DenseState":
        """Project a random vector onto the tableau's stabilizer subspace."""
        n = state.n
        if n > MAX_QUBITS:
            raise ValueError(f"dense oracle capped at {MAX_QUBITS} qubits")
        sx = state.x_bits
        sz = state.z_bits
        signs = state.signs
        shifts = np.array([1 << (n - 1 - k) for k in range(n)], dtype=np.int64)
        idx = np.arange(2 ** n, dtype=np.int64)
        rng = np.random.default_rng(seed)
        for _ in range(8):
            psi = rng.normal(size=2 ** n) + 1j * rng.normal(size=2 ** n)
            for g in range(n):
                x_int = int((sx[g] * shifts).sum())
                z_int = int((sz[g] * shifts).sum())
                y_count = int((sx[g] & sz[g]).sum())
                phase = (1j ** y_count) * np.where(
                    (np.bitwise_count(np.int64(z_int) & (idx ^ x_int)) & 1).astype(bool),
                    -1.0, 1.0)
                p_psi = phase * psi[idx ^ x_int]
                if signs[g]:
                    p_psi = -p_psi
                psi = (psi + p_psi) / 2
            norm = np.linalg.norm(psi)
            if norm > 1e-6:
                return cls(n, (psi / norm).astype(np.complex128))
        raise RuntimeError("projection onto stabilizer subspace kept vanishing")

    @classmethod
    def from_text(cls, text: str) -> "DenseState":
        return cls.from_tableau(StabilizerTableau.from_text(text))

    def copy(self) -> "DenseState":
        return DenseState(self.n, self.amplitudes.copy())

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def apply_two_qubit(self, u: np.ndarray, i: int, j: int) -> "DenseState":
        """Apply a 4x4 unitary to qubits (i, j); mutates and returns self."""
        if i == j or not (0 <= i < self.n and 0 <= j < self.n):
            raise ValueError("bad gate qubits")
        tensor = self.amplitudes.reshape((2,) * self.n)
        out = np.tensordot(u.reshape(2, 2, 2, 2), tensor, axes=[(2, 3), (i, j)])
        out = np.moveaxis(out, (0, 1), (i, j))
        self.amplitudes = np.ascontiguousarray(out).reshape(-1)
        return self

    def apply_clifford2(self, gate: TwoQubitClifford, i: int, j: int) -> "DenseState":
        return self.apply_two_qubit(clifford_to_unitary(gate), i, j)

    def entropy(self, qubits) -> float:
        """Von Neumann entropy (base 2) of the reduced state on the subset,
        from the Schmidt spectrum across the cut."""
        qs = _as_qubit_array(qubits, self.n)
        rest = [k for k in range(self.n) if k not in set(qs.tolist())]
        tensor = self.amplitudes.reshape((2,) * self.n)
        mat = np.transpose(tensor, list(qs) + rest).reshape(2 ** qs.size, -1)
        sv = np.linalg.svd(mat, compute_uv=False)
        probs = sv ** 2
        probs = probs[probs > 1e-12]
        return float(-(probs * np.log2(probs)).sum())

    def measure_z(self, q: int, rng: np.random.Generator | None = None,
                  coin: int | None = None) -> MeasurementOutcome:
        """Born-rule Z measurement with renormalized projection.

        For the random branch the outcome comes from coin when given (the
        replay hook used to couple against the tableau simulator, valid
        because stabilizer outcome probabilities are exactly 1/2), else
        from rng.
        """
        if not 0 <= q < self.n:
            raise IndexError("measured qubit out of range")
        tensor = self.amplitudes.reshape((2,) * self.n)
        sl0 = np.moveaxis(tensor, q, 0)[0]
        prob0 = float((np.abs(sl0) ** 2).sum())
        tol = 1e-9
        if prob0 > 1 - tol:
            value, deterministic = 0, True
        elif prob0 < tol:
            value, deterministic = 1, True
        elif coin is not None:
            value, deterministic = int(coin), False
        else:
            if rng is None:
                raise ValueError("random outcome needs rng or coin")
            value, deterministic = int(rng.random() >= prob0), False
        if not deterministic:
            view = np.moveaxis(tensor, q, 0)
            view[1 - value] = 0.0
            flat = tensor.reshape(-1)
            flat /= np.linalg.norm(flat)
            self.amplitudes = flat
        return MeasurementOutcome(value, deterministic)
