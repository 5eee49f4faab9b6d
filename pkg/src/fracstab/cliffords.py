"""Two-qubit Clifford gates as symplectic GF(2) maps with sign data.

A gate is stored by what conjugation does to the four local Pauli
generators (X on the first qubit, Z on the first, X on the second, Z on the
second). Coordinates of a two-qubit Pauli are packed into 4 bits:
bit0 = x(first), bit1 = z(first), bit2 = x(second), bit3 = z(second), so the
single-site codes are 0=I, 1=X, 2=Z, 3=Y.

The full group modulo global phase (11520 elements) is enumerated once by
closing the generator set {H, S on either qubit, CNOT} under composition.
Sampling a uniform element is then an index draw, and every element carries
a 16-entry lookup table mapping (input Pauli, sign) -> (output Pauli, sign)
that the tableau kernels consume directly.
"""

from __future__ import annotations

from collections import deque
from functools import lru_cache

import numpy as np

# i-exponent of sigma_a . sigma_b (single site), codes 0=I, 1=X, 2=Z, 3=Y:
# e.g. X.Z = -iY -> 3, Z.X = +iY -> 1.
_G1 = np.array([
    [0, 0, 0, 0],
    [0, 0, 3, 1],
    [0, 1, 0, 3],
    [0, 3, 1, 0],
], dtype=np.uint8)

# Two-site version on packed 4-bit coordinates.
_G2 = np.zeros((16, 16), dtype=np.uint8)
for _a in range(16):
    for _b in range(16):
        _G2[_a, _b] = (_G1[_a & 3, _b & 3] + _G1[(_a >> 2) & 3, (_b >> 2) & 3]) % 4

# Number of Y factors in a packed Pauli (sites with both x and z set).
_Y_COUNT = np.array([bin(v & (v >> 1) & 0b0101).count("1") for v in range(16)],
                    dtype=np.uint8)

# Symplectic form for the (x1, z1, x2, z2) coordinate order.
OMEGA = np.array([
    [0, 1, 0, 0],
    [1, 0, 0, 0],
    [0, 0, 0, 1],
    [0, 0, 1, 0],
], dtype=np.uint8)

GROUP_SIZE = 11520
SYMPLECTIC_CLASSES = 720


def _build_luts(images: np.ndarray, signs: np.ndarray):
    """Per-gate lookup tables: for each packed input Pauli v, the packed
    output Pauli and the sign flip of conjugation.

    images[g, k] is the packed coordinate of the image of generator k,
    signs[g, k] its sign bit. Phase bookkeeping: the input Pauli factors as
    i^{#Y} X1^a Z1^b X2^c Z2^d; substituting images and re-normalizing the
    ordered product to a Hermitian Pauli accumulates i-exponents that must
    come out even.
    """
    images = np.asarray(images, dtype=np.uint8).reshape(-1, 4)
    signs = np.asarray(signs, dtype=np.uint8).reshape(-1, 4)
    n = images.shape[0]
    lut_v = np.zeros((n, 16), dtype=np.uint8)
    lut_f = np.zeros((n, 16), dtype=np.uint8)
    for v in range(16):
        coords = np.zeros(n, dtype=np.uint8)
        iexp = np.zeros(n, dtype=np.uint8)
        flip = np.zeros(n, dtype=np.uint8)
        for k in range(4):
            if (v >> k) & 1:
                iexp = (iexp + _G2[coords, images[:, k]]) % 4
                coords ^= images[:, k]
                flip ^= signs[:, k]
        tot = (iexp + _Y_COUNT[v]) % 4
        if np.any(tot & 1):
            raise ValueError("action does not map Hermitian Paulis to Hermitian Paulis")
        lut_v[:, v] = coords
        lut_f[:, v] = flip ^ (tot >> 1)
    return lut_v, lut_f


class TwoQubitClifford:
    """A two-qubit Clifford modulo global phase.

    symplectic is the 4x4 GF(2) matrix whose row k gives the coordinates of
    the conjugated image of generator k (order X1, Z1, X2, Z2); sign_flips
    holds the sign bit of each image.
    """

    __slots__ = ("symplectic", "sign_flips", "_luts")

    def __init__(self, symplectic, sign_flips):
        m = np.asarray(symplectic, dtype=np.uint8) & 1
        s = np.asarray(sign_flips, dtype=np.uint8) & 1
        if m.shape != (4, 4) or s.shape != (4,):
            raise ValueError("expected a 4x4 bit matrix and a 4-bit sign vector")
        if not np.array_equal((m @ OMEGA @ m.T) % 2, OMEGA):
            raise ValueError("matrix does not preserve the symplectic form")
        m.setflags(write=False)
        s.setflags(write=False)
        self.symplectic = m
        self.sign_flips = s
        self._luts = None

    @classmethod
    def from_images(cls, images, sign_flips=(0, 0, 0, 0)) -> "TwoQubitClifford":
        """Build from packed image coordinates (one 4-bit value per generator)."""
        m = np.zeros((4, 4), dtype=np.uint8)
        for k, img in enumerate(images):
            for c in range(4):
                m[k, c] = (int(img) >> c) & 1
        return cls(m, np.asarray(sign_flips, dtype=np.uint8))

    @property
    def images(self) -> np.ndarray:
        """Packed 4-bit image coordinates of the four generators."""
        weights = np.array([1, 2, 4, 8], dtype=np.uint8)
        return (self.symplectic * weights).sum(axis=1).astype(np.uint8)

    def luts(self):
        """(lut_v, lut_f) 16-entry conjugation tables for the kernels."""
        if self._luts is None:
            lv, lf = _build_luts(self.images, self.sign_flips)
            self._luts = (lv[0], lf[0])
        return self._luts

    def key(self) -> int:
        """Packed integer identifying the element (images and signs)."""
        k = 0
        for i, (m, s) in enumerate(zip(self.images, self.sign_flips)):
            k |= (int(m) | (int(s) << 4)) << (5 * i)
        return k

    def __eq__(self, other):
        if not isinstance(other, TwoQubitClifford):
            return NotImplemented
        return self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return f"TwoQubitClifford(images={list(self.images)}, signs={list(self.sign_flips)})"


# Elementary gate actions; the first-listed qubit of apply_clifford2 is
# "first" here. S maps X -> Y; CNOT control is the first qubit.
_ELEMENTARY_IMAGES = {
    "h_first": (2, 1, 4, 8),
    "h_second": (1, 2, 8, 4),
    "s_first": (3, 2, 4, 8),
    "s_second": (1, 2, 12, 8),
    "cnot": (5, 2, 4, 10),
}
GENERATOR_NAMES = ("h_first", "h_second", "s_first", "s_second", "cnot")

IDENTITY = TwoQubitClifford.from_images((1, 2, 4, 8))
H_FIRST = TwoQubitClifford.from_images(_ELEMENTARY_IMAGES["h_first"])
H_SECOND = TwoQubitClifford.from_images(_ELEMENTARY_IMAGES["h_second"])
S_FIRST = TwoQubitClifford.from_images(_ELEMENTARY_IMAGES["s_first"])
S_SECOND = TwoQubitClifford.from_images(_ELEMENTARY_IMAGES["s_second"])
CNOT = TwoQubitClifford.from_images(_ELEMENTARY_IMAGES["cnot"])
CZ = TwoQubitClifford.from_images((9, 2, 6, 8))
SWAP = TwoQubitClifford.from_images((4, 8, 1, 2))


class CliffordGroupTable:
    """Exhaustive table of the two-qubit Clifford group modulo phase.

    Elements are indexed in breadth-first discovery order from the identity,
    which makes the table (and therefore sampling) deterministic. words[g]
    is a sequence of generator indices composing to element g, applied left
    to right (used to rebuild dense unitaries).
    """

    def __init__(self):
        gen_luts = [
            _build_luts(np.array(_ELEMENTARY_IMAGES[name]), np.zeros(4))
            for name in GENERATOR_NAMES
        ]
        gen_luts = [(lv[0], lf[0]) for lv, lf in gen_luts]

        def key_of(ms, ss):
            k = 0
            for i in range(4):
                k |= (ms[i] | (ss[i] << 4)) << (5 * i)
            return k

        start = ((1, 2, 4, 8), (0, 0, 0, 0))
        index = {key_of(*start): 0}
        items = [start]
        words: list[tuple[int, ...]] = [()]
        queue = deque([0])
        while queue:
            cur = queue.popleft()
            ms, ss = items[cur]
            for gi, (lv, lf) in enumerate(gen_luts):
                new_m = tuple(int(lv[m]) for m in ms)
                new_s = tuple(int(s) ^ int(lf[m]) for m, s in zip(ms, ss))
                k = key_of(new_m, new_s)
                if k not in index:
                    index[k] = len(items)
                    items.append((new_m, new_s))
                    words.append(words[cur] + (gi,))
                    queue.append(len(items) - 1)
        if len(items) != GROUP_SIZE:
            raise AssertionError(f"group closure produced {len(items)} elements")

        self.size = len(items)
        self.images = np.array([m for m, _ in items], dtype=np.uint8)
        self.signs = np.array([s for _, s in items], dtype=np.uint8)
        self.lut_v, self.lut_f = _build_luts(self.images, self.signs)
        self.words = words
        self._index = index

        class_index: dict[tuple, int] = {}
        class_ids = np.zeros(self.size, dtype=np.int32)
        for g in range(self.size):
            mkey = tuple(self.images[g])
            class_ids[g] = class_index.setdefault(mkey, len(class_index))
        if len(class_index) != SYMPLECTIC_CLASSES:
            raise AssertionError(f"{len(class_index)} symplectic classes")
        self.class_ids = class_ids
        self.n_classes = len(class_index)

    def gate(self, gid: int) -> TwoQubitClifford:
        """Materialize element gid with its lookup tables attached."""
        g = TwoQubitClifford.from_images(self.images[gid], self.signs[gid])
        g._luts = (self.lut_v[gid], self.lut_f[gid])
        return g

    def id_of(self, gate: TwoQubitClifford) -> int:
        """Index of an arbitrary valid gate in the table."""
        return self._index[gate.key()]

    def word(self, gid: int) -> tuple[int, ...]:
        return self.words[gid]


@lru_cache(maxsize=1)
def group_table() -> CliffordGroupTable:
    """The lazily built, process-wide group table."""
    return CliffordGroupTable()


def sample_two_qubit_clifford(rng: np.random.Generator) -> TwoQubitClifford:
    """Draw a uniform two-qubit Clifford (modulo global phase)."""
    table = group_table()
    return table.gate(int(rng.integers(table.size)))


def sample_gate_ids(rng: np.random.Generator, size: int) -> np.ndarray:
    """Vector of uniform group-table indices, for circuit layers."""
    return rng.integers(group_table().size, size=size, dtype=np.int64)
