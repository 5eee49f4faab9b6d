"""Pure-numpy kernels for the packed CHP tableau and GF(2) rank queries.

Reference implementation of the hot-loop contract; the numba backend mirrors
these semantics exactly. Tableau layout: rows 0..n-1 are destabilizers, rows
n..2n-1 are stabilizers; x/z are (2n, W) uint64 with qubit q at word q >> 6,
bit q & 63; r is (2n,) uint8 sign bits (1 means a -1 phase).
"""

from __future__ import annotations

import numpy as np

from ..bits import pack_rows

BACKEND_NAME = "numpy"

_U1 = np.uint64(1)


def _phase_exponents(x1, z1, x2, z2):
    """Summed i-exponent (as +/- popcounts) of multiplying row1 into row2."""
    plus = (x1 & z1 & ~x2 & z2) | (x1 & ~z1 & x2 & z2) | (~x1 & z1 & x2 & ~z2)
    minus = (x1 & z1 & x2 & ~z2) | (x1 & ~z1 & ~x2 & z2) | (~x1 & z1 & x2 & z2)
    return plus, minus


def _rowsum_many(x, z, r, targets, p):
    """Multiply row p into every row listed in targets, tracking signs."""
    x1, z1 = x[p], z[p]
    x2, z2 = x[targets], z[targets]
    plus, minus = _phase_exponents(x1, z1, x2, z2)
    tot = np.bitwise_count(plus).sum(axis=1).astype(np.int64)
    tot -= np.bitwise_count(minus).sum(axis=1).astype(np.int64)
    ph = (2 * r[targets].astype(np.int64) + 2 * int(r[p]) + tot) % 4
    r[targets] = (ph >> 1).astype(np.uint8)
    x[targets] ^= x1
    z[targets] ^= z1


def apply_gate(x, z, r, n, lut_v, lut_f, i, j):
    """Conjugate all 2n rows by a two-qubit gate given its 16-entry LUT."""
    wi, bi = i >> 6, np.uint64(i & 63)
    wj, bj = j >> 6, np.uint64(j & 63)
    mi = _U1 << bi
    mj = _U1 << bj
    xi = (x[:, wi] >> bi) & _U1
    zi = (z[:, wi] >> bi) & _U1
    xj = (x[:, wj] >> bj) & _U1
    zj = (z[:, wj] >> bj) & _U1
    v = (xi | (zi << _U1) | (xj << np.uint64(2)) | (zj << np.uint64(3))).astype(np.intp)
    nv = lut_v[v].astype(np.uint64)
    r ^= lut_f[v]
    x[:, wi] = (x[:, wi] & ~mi) | ((nv & _U1) << bi)
    z[:, wi] = (z[:, wi] & ~mi) | (((nv >> _U1) & _U1) << bi)
    x[:, wj] = (x[:, wj] & ~mj) | (((nv >> np.uint64(2)) & _U1) << bj)
    z[:, wj] = (z[:, wj] & ~mj) | (((nv >> np.uint64(3)) & _U1) << bj)


def measure(x, z, r, n, q, coin):
    """Projective Z measurement of qubit q; returns (value, was_random).

    coin supplies the outcome bit used only when the result is random.
    """
    wq = q >> 6
    mq = _U1 << np.uint64(q & 63)
    anti = (x[:, wq] & mq) != 0
    stab_anti = np.nonzero(anti[n:])[0]
    if stab_anti.size:
        p = int(stab_anti[0]) + n
        targets = np.nonzero(anti)[0]
        targets = targets[targets != p]
        if targets.size:
            _rowsum_many(x, z, r, targets, p)
        x[p - n] = x[p]
        z[p - n] = z[p]
        r[p - n] = r[p]
        x[p] = 0
        z[p] = 0
        z[p, wq] = mq
        r[p] = coin
        return int(coin), True
    # Deterministic: multiply out the stabilizer partners of every
    # anticommuting destabilizer; the accumulated sign is the outcome.
    sx = np.zeros_like(x[0])
    sz = np.zeros_like(z[0])
    acc = 0
    for h in np.nonzero(anti[:n])[0]:
        src = int(h) + n
        plus, minus = _phase_exponents(x[src], z[src], sx, sz)
        tot = int(np.bitwise_count(plus).sum()) - int(np.bitwise_count(minus).sum())
        acc = (acc + 2 * int(r[src]) + tot) % 4
        sx ^= x[src]
        sz ^= z[src]
    return (acc >> 1) & 1, False


def run_circuit(x, z, r, n, steps, bonds_odd, bonds_even, gate_ids,
                lut_v, lut_f, meas_mask, coins):
    """Drive the brickwork circuit: one gate layer then one measurement sweep
    per step. Gate ids are consumed left to right; coins are indexed (t, q)."""
    g = 0
    for t in range(1, steps + 1):
        bonds = bonds_odd if t % 2 == 1 else bonds_even
        for k in range(bonds.shape[0]):
            gid = int(gate_ids[g])
            g += 1
            apply_gate(x, z, r, n, lut_v[gid], lut_f[gid],
                       int(bonds[k, 0]), int(bonds[k, 1]))
        row = meas_mask[t - 1]
        for q in np.nonzero(row)[0]:
            measure(x, z, r, n, int(q), int(coins[t - 1, q]))
    return g


def gf2_rank_words(rows, n_cols):
    """GF(2) rank of a packed bit matrix. Mutates rows; pass a scratch copy."""
    m = rows.shape[0]
    rank = 0
    for c in range(n_cols):
        wc = c >> 6
        mc = _U1 << np.uint64(c & 63)
        nz = np.nonzero(rows[rank:, wc] & mc)[0]
        if nz.size == 0:
            continue
        p = rank + int(nz[0])
        if p != rank:
            rows[[rank, p]] = rows[[p, rank]]
        rest = nz[1:] + rank
        if rest.size:
            rows[rest] ^= rows[rank]
        rank += 1
        if rank == m:
            break
    return rank


def subset_rank(x, z, n, qubits):
    """GF(2) rank of the stabilizer block restricted to a qubit subset
    (both the x and z column of each listed qubit)."""
    k = len(qubits)
    cols = np.empty((n, 2 * k), dtype=np.uint8)
    for t in range(k):
        q = int(qubits[t])
        wq = q >> 6
        bq = np.uint64(q & 63)
        cols[:, 2 * t] = (x[n:, wq] >> bq) & _U1
        cols[:, 2 * t + 1] = (z[n:, wq] >> bq) & _U1
    sub = pack_rows(cols)
    return gf2_rank_words(sub, 2 * k)
