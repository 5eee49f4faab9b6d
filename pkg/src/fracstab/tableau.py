"""Pure stabilizer states on a register of qubits, CHP tableau style.

The public view of a state is its n stabilizer generators (n binary strings
of length 2n plus sign bits). Internally the tableau also carries n
destabilizer rows so that deterministic measurement outcomes cost O(n^2/64)
instead of a fresh linear solve; the destabilizers never appear in any
observable or in the text format.

Subset entanglement entropy uses the GF(2) rank identity for stabilizer
states: S(A) = rank of the stabilizer matrix restricted to A's columns
minus |A| (in bits). It is validated against the dense statevector oracle
in the test suite.
"""

from __future__ import annotations

from typing import Iterable, NamedTuple, Sequence

import numpy as np

from . import backends as K
from .bits import pack_rows, unpack_rows, words_for
from .cliffords import TwoQubitClifford


class MeasurementOutcome(NamedTuple):
    """Result of a projective Z measurement: value 0 maps to the +1
    eigenvalue, 1 to -1."""
    value: int
    was_deterministic: bool


def gf2_rank(matrix) -> int:
    """Row rank of a 0/1 matrix over GF(2); the input is left untouched."""
    bits = np.atleast_2d(np.asarray(matrix, dtype=np.uint8))
    if bits.size == 0:
        return 0
    return int(K.gf2_rank_words(pack_rows(bits), bits.shape[1]))


def _as_qubit_array(qubits, n: int, *, allow_empty: bool = False) -> np.ndarray:
    qs = np.asarray(sorted(int(q) for q in qubits), dtype=np.int64)
    if qs.size == 0 and not allow_empty:
        raise ValueError("empty qubit subset")
    if qs.size and (qs[0] < 0 or qs[-1] >= n):
        raise IndexError(f"qubit index out of range for {n} qubits")
    if np.unique(qs).size != qs.size:
        raise ValueError("duplicate qubit indices in subset")
    return qs


class StabilizerTableau:
    """An n-qubit pure stabilizer state."""

    __slots__ = ("n", "_x", "_z", "_r")

    def __init__(self, n: int, x: np.ndarray, z: np.ndarray, r: np.ndarray):
        self.n = n
        self._x = x
        self._z = z
        self._r = r

    # -- construction ------------------------------------------------------

    @classmethod
    def new_product_state(cls, n_qubits: int) -> "StabilizerTableau":
        """The all-zeros computational state: stabilizers +Z_i."""
        if n_qubits < 1:
            raise ValueError("need at least one qubit")
        n = int(n_qubits)
        w = words_for(n)
        x = np.zeros((2 * n, w), dtype=np.uint64)
        z = np.zeros((2 * n, w), dtype=np.uint64)
        r = np.zeros(2 * n, dtype=np.uint8)
        one = np.uint64(1)
        for q in range(n):
            x[q, q >> 6] |= one << np.uint64(q & 63)          # destabilizer X_q
            z[n + q, q >> 6] |= one << np.uint64(q & 63)      # stabilizer Z_q
        return cls(n, x, z, r)

    def copy(self) -> "StabilizerTableau":
        return StabilizerTableau(self.n, self._x.copy(), self._z.copy(),
                                 self._r.copy())

    # -- spec'd field views ------------------------------------------------

    @property
    def n_qubits(self) -> int:
        return self.n

    @property
    def x_bits(self) -> np.ndarray:
        """(n, n) X bits of the stabilizer generators (copy)."""
        return unpack_rows(self._x[self.n:], self.n)

    @property
    def z_bits(self) -> np.ndarray:
        """(n, n) Z bits of the stabilizer generators (copy)."""
        return unpack_rows(self._z[self.n:], self.n)

    @property
    def signs(self) -> np.ndarray:
        """Sign bits of the stabilizer generators (copy); 1 means -1."""
        return self._r[self.n:].copy()

    # -- dynamics ----------------------------------------------------------

    def apply_clifford2(self, gate: TwoQubitClifford, i: int, j: int) -> "StabilizerTableau":
        """Conjugate the state by a two-qubit Clifford acting on qubits
        (i, j); i is the gate's first qubit. Mutates and returns self."""
        i, j = int(i), int(j)
        if i == j:
            raise ValueError("gate qubits must differ")
        if not (0 <= i < self.n and 0 <= j < self.n):
            raise IndexError("gate qubit out of range")
        lut_v, lut_f = gate.luts()
        K.apply_gate(self._x, self._z, self._r, self.n, lut_v, lut_f, i, j)
        return self

    def measure_z(self, q: int, rng: np.random.Generator) -> MeasurementOutcome:
        """Projective Z-basis measurement of qubit q."""
        q = int(q)
        if not 0 <= q < self.n:
            raise IndexError("measured qubit out of range")
        wq = q >> 6
        mq = np.uint64(1) << np.uint64(q & 63)
        random_branch = bool((self._x[self.n:, wq] & mq).any())
        coin = int(rng.integers(2)) if random_branch else 0
        value, was_random = K.measure(self._x, self._z, self._r, self.n, q, coin)
        return MeasurementOutcome(int(value), not was_random)

    # -- entanglement queries ----------------------------------------------

    def subset_entropy(self, qubits: Iterable[int]) -> int:
        """Entanglement entropy (bits) of a qubit subset with the rest."""
        qs = _as_qubit_array(qubits, self.n)
        rank = int(K.subset_rank(self._x, self._z, self.n, qs))
        return rank - qs.size

    def total_correlation(self, parts: Sequence[Iterable[int]]) -> int:
        """Sum of part entropies minus the entropy of their union (bits)."""
        arrays = [_as_qubit_array(p, self.n) for p in parts]
        total = sum(a.size for a in arrays)
        union = np.unique(np.concatenate(arrays)) if arrays else np.array([], dtype=np.int64)
        if union.size != total:
            raise ValueError("parts must be pairwise disjoint")
        if not arrays:
            raise ValueError("need at least one part")
        s_parts = sum(self.subset_entropy(a) for a in arrays)
        return s_parts - self.subset_entropy(union)

    # -- integrity ----------------------------------------------------------

    def validate(self) -> None:
        """Check all tableau invariants; raises ValueError on violation."""
        n = self.n
        if self._x.shape != (2 * n, words_for(n)) or self._z.shape != self._x.shape:
            raise ValueError("tableau arrays have wrong shape")
        if not np.isin(self._r, (0, 1)).all():
            raise ValueError("sign bits must be 0 or 1")
        sx = unpack_rows(self._x[n:], n).astype(np.int64)
        sz = unpack_rows(self._z[n:], n).astype(np.int64)
        dx = unpack_rows(self._x[:n], n).astype(np.int64)
        dz = unpack_rows(self._z[:n], n).astype(np.int64)
        if ((sx @ sz.T + sz @ sx.T) % 2).any():
            raise ValueError("stabilizer generators do not all commute")
        full = np.arange(n, dtype=np.int64)
        if int(K.subset_rank(self._x, self._z, n, full)) != n:
            raise ValueError("stabilizer generators are not independent")
        if not np.array_equal((dx @ sz.T + dz @ sx.T) % 2, np.eye(n, dtype=np.int64)):
            raise ValueError("destabilizer pairing broken")
        if ((dx @ dz.T + dz @ dx.T) % 2).any():
            raise ValueError("destabilizers do not commute among themselves")

    # -- text format ---------------------------------------------------------

    def to_text(self) -> str:
        """Serialize the stabilizer generators.

        Line 1 is "L=<n>"; each following line is n x-bits, n z-bits and a
        sign character ('1' marks a negative phase).
        """
        sx = unpack_rows(self._x[self.n:], self.n)
        sz = unpack_rows(self._z[self.n:], self.n)
        lines = [f"L={self.n}"]
        for g in range(self.n):
            row = "".join(map(str, sx[g])) + "".join(map(str, sz[g]))
            lines.append(row + str(int(self._r[self.n + g])))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "StabilizerTableau":
        """Parse the text format, rebuilding destabilizers."""
        lines = [ln for ln in text.splitlines() if ln.strip()]
        if not lines or not lines[0].startswith("L="):
            raise ValueError("missing L= header line")
        n = int(lines[0][2:])
        if len(lines) != n + 1:
            raise ValueError(f"expected {n} generator lines")
        sx = np.zeros((n, n), dtype=np.uint8)
        sz = np.zeros((n, n), dtype=np.uint8)
        signs = np.zeros(n, dtype=np.uint8)
        for g, ln in enumerate(lines[1:]):
            if len(ln) != 2 * n + 1 or set(ln) - {"0", "1"}:
                raise ValueError(f"bad generator line {g}")
            sx[g] = [int(c) for c in ln[:n]]
            sz[g] = [int(c) for c in ln[n:2 * n]]
            signs[g] = int(ln[2 * n])
        dx, dz = _complete_destabilizers(sx, sz)
        x = np.concatenate([pack_rows(dx), pack_rows(sx)])
        z = np.concatenate([pack_rows(dz), pack_rows(sz)])
        r = np.concatenate([np.zeros(n, dtype=np.uint8), signs])
        state = cls(n, x, z, r)
        state.validate()
        return state

    # -- misc -----------------------------------------------------------------

    def permute_qubits(self, perm: Sequence[int]) -> "StabilizerTableau":
        """New state with old qubit k relabeled to perm[k]."""
        perm = np.asarray(perm, dtype=np.int64)
        if sorted(perm.tolist()) != list(range(self.n)):
            raise ValueError("perm must be a permutation of the qubit range")
        xb = unpack_rows(self._x, self.n)
        zb = unpack_rows(self._z, self.n)
        xp = np.zeros_like(xb)
        zp = np.zeros_like(zb)
        xp[:, perm] = xb
        zp[:, perm] = zb
        return StabilizerTableau(self.n, pack_rows(xp), pack_rows(zp),
                                 self._r.copy())

    def __eq__(self, other):
        if not isinstance(other, StabilizerTableau):
            return NotImplemented
        return (self.n == other.n
                and np.array_equal(self._x, other._x)
                and np.array_equal(self._z, other._z)
                and np.array_equal(self._r, other._r))

    def __repr__(self):
        return f"StabilizerTableau(n={self.n})"


def new_product_state(n_qubits: int) -> StabilizerTableau:
    """Module-level alias for StabilizerTableau.new_product_state."""
    return StabilizerTableau.new_product_state(n_qubits)


def _complete_destabilizers(sx: np.ndarray, sz: np.ndarray):
    """Destabilizer rows for given stabilizer bits: D_i anticommutes with
    S_i only, and all D_i commute among themselves.

    Solves the symplectic linear system <D_i, S_j> = delta_ij, then fixes
    mutual commutation by multiplying stabilizers in (a symplectic
    Gram-Schmidt pass, which cannot disturb the already-fixed products).
    """
    n = sx.shape[0]
    # Coefficient matrix of <(a|b), S_j> = a . z_j + b . x_j.
    coeff = np.concatenate([sz, sx], axis=1).astype(np.uint8)
    aug = np.concatenate([coeff, np.eye(n, dtype=np.uint8)], axis=1)
    pivots = []
    row = 0
    for col in range(2 * n):
        hit = None
        for h in range(row, n):
            if aug[h, col]:
                hit = h
                break
        if hit is None:
            continue
        if hit != row:
            aug[[row, hit]] = aug[[hit, row]]
        for h in range(n):
            if h != row and aug[h, col]:
                aug[h] ^= aug[row]
        pivots.append(col)
        row += 1
        if row == n:
            break
    if row < n:
        raise ValueError("stabilizer generators are not independent")
    transform = aug[:, 2 * n:]
    sol = np.zeros((n, 2 * n), dtype=np.uint8)
    for k, col in enumerate(pivots):
        sol[:, col] = transform[k, :]
    dx, dz = sol[:, :n].copy(), sol[:, n:].copy()
    for i in range(n):
        for j in range(i + 1, n):
            if (int(dx[i] @ dz[j]) + int(dz[i] @ dx[j])) % 2:
                dx[j] ^= sx[i]
                dz[j] ^= sz[i]
    return dx, dz
