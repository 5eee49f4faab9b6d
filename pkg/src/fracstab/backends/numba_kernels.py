"""Numba-jitted kernels; same contract as numpy_kernels, explicit loops.

All functions release the GIL so ensemble realizations can run on a thread
pool. First call per process pays JIT compilation (cached on disk).
"""

from __future__ import annotations

import numpy as np
from numba import njit

BACKEND_NAME = "numba"

_M1 = np.uint64(0x5555555555555555)
_M2 = np.uint64(0x3333333333333333)
_M4 = np.uint64(0x0F0F0F0F0F0F0F0F)
_H01 = np.uint64(0x0101010101010101)


@njit(cache=True, nogil=True, inline="always")
def _popcount64(v):
    v = v - ((v >> np.uint64(1)) & _M1)
    v = (v & _M2) + ((v >> np.uint64(2)) & _M2)
    v = (v + (v >> np.uint64(4))) & _M4
    return (v * _H01) >> np.uint64(56)


@njit(cache=True, nogil=True)
def _rowsum(x, z, r, h, p):
    # row h *= row p, with the CHP mod-4 sign bookkeeping
    tot = 0
    for w in range(x.shape[1]):
        x1 = x[p, w]
        z1 = z[p, w]
        x2 = x[h, w]
        z2 = z[h, w]
        plus = (x1 & z1 & ~x2 & z2) | (x1 & ~z1 & x2 & z2) | (~x1 & z1 & x2 & ~z2)
        minus = (x1 & z1 & x2 & ~z2) | (x1 & ~z1 & ~x2 & z2) | (~x1 & z1 & x2 & z2)
        tot += int(_popcount64(plus)) - int(_popcount64(minus))
        x[h, w] = x2 ^ x1
        z[h, w] = z2 ^ z1
    ph = (2 * int(r[h]) + 2 * int(r[p]) + tot) % 4
    r[h] = np.uint8(ph >> 1)


@njit(cache=True, nogil=True)
def apply_gate(x, z, r, n, lut_v, lut_f, i, j):
    wi = i >> 6
    bi = np.uint64(i & 63)
    wj = j >> 6
    bj = np.uint64(j & 63)
    one = np.uint64(1)
    mi = one << bi
    mj = one << bj
    for h in range(2 * n):
        xi = (x[h, wi] >> bi) & one
        zi = (z[h, wi] >> bi) & one
        xj = (x[h, wj] >> bj) & one
        zj = (z[h, wj] >> bj) & one
        v = int(xi | (zi << one) | (xj << np.uint64(2)) | (zj << np.uint64(3)))
        nv = np.uint64(lut_v[v])
        r[h] ^= lut_f[v]
        x[h, wi] = (x[h, wi] & ~mi) | ((nv & one) << bi)
        z[h, wi] = (z[h, wi] & ~mi) | (((nv >> one) & one) << bi)
        x[h, wj] = (x[h, wj] & ~mj) | (((nv >> np.uint64(2)) & one) << bj)
        z[h, wj] = (z[h, wj] & ~mj) | (((nv >> np.uint64(3)) & one) << bj)


@njit(cache=True, nogil=True)
def measure(x, z, r, n, q, coin):
    wq = q >> 6
    mq = np.uint64(1) << np.uint64(q & 63)
    zero = np.uint64(0)
    p = -1
    for h in range(n, 2 * n):
        if x[h, wq] & mq != zero:
            p = h
            break
    if p >= 0:
        for h in range(2 * n):
            if h != p and (x[h, wq] & mq) != zero:
                _rowsum(x, z, r, h, p)
        x[p - n, :] = x[p, :]
        z[p - n, :] = z[p, :]
        r[p - n] = r[p]
        x[p, :] = zero
        z[p, :] = zero
        z[p, wq] = mq
        r[p] = np.uint8(coin)
        return int(coin), True
    # deterministic outcome: accumulate stabilizer partners of the
    # anticommuting destabilizers into a scratch row
    W = x.shape[1]
    sx = np.zeros(W, dtype=np.uint64)
    sz = np.zeros(W, dtype=np.uint64)
    acc = 0
    for h in range(n):
        if (x[h, wq] & mq) != zero:
            src = h + n
            tot = 0
            for w in range(W):
                x1 = x[src, w]
                z1 = z[src, w]
                x2 = sx[w]
                z2 = sz[w]
                plus = (x1 & z1 & ~x2 & z2) | (x1 & ~z1 & x2 & z2) | (~x1 & z1 & x2 & ~z2)
                minus = (x1 & z1 & x2 & ~z2) | (x1 & ~z1 & ~x2 & z2) | (~x1 & z1 & x2 & z2)
                tot += int(_popcount64(plus)) - int(_popcount64(minus))
                sx[w] = x2 ^ x1
                sz[w] = z2 ^ z1
            acc = (acc + 2 * int(r[src]) + tot) % 4
    return (acc >> 1) & 1, False


@njit(cache=True, nogil=True)
def run_circuit(x, z, r, n, steps, bonds_odd, bonds_even, gate_ids,
                lut_v, lut_f, meas_mask, coins):
    g = 0
    for t in range(1, steps + 1):
        if t % 2 == 1:
            bonds = bonds_odd
        else:
            bonds = bonds_even
        for k in range(bonds.shape[0]):
            gid = gate_ids[g]
            g += 1
            apply_gate(x, z, r, n, lut_v[gid], lut_f[gid],
                       bonds[k, 0], bonds[k, 1])
        for q in range(n):
            if meas_mask[t - 1, q]:
                measure(x, z, r, n, q, coins[t - 1, q])
    return g


@njit(cache=True, nogil=True)
def gf2_rank_words(rows, n_cols):
    m = rows.shape[0]
    W = rows.shape[1]
    zero = np.uint64(0)
    rank = 0
    for c in range(n_cols):
        wc = c >> 6
        mc = np.uint64(1) << np.uint64(c & 63)
        piv = -1
        for h in range(rank, m):
            if (rows[h, wc] & mc) != zero:
                piv = h
                break
        if piv < 0:
            continue
        if piv != rank:
            for w in range(W):
                tmp = rows[rank, w]
                rows[rank, w] = rows[piv, w]
                rows[piv, w] = tmp
        for h in range(rank + 1, m):
            if (rows[h, wc] & mc) != zero:
                for w in range(W):
                    rows[h, w] ^= rows[rank, w]
        rank += 1
        if rank == m:
            break
    return rank


@njit(cache=True, nogil=True)
def subset_rank(x, z, n, qubits):
    k = qubits.shape[0]
    n_cols = 2 * k
    WW = (n_cols + 63) // 64
    sub = np.zeros((n, WW), dtype=np.uint64)
    one = np.uint64(1)
    zero = np.uint64(0)
    for t in range(k):
        q = qubits[t]
        wq = q >> 6
        mq = one << np.uint64(q & 63)
        cx = 2 * t
        cz = 2 * t + 1
        for h in range(n):
            if (x[n + h, wq] & mq) != zero:
                sub[h, cx >> 6] |= one << np.uint64(cx & 63)
            if (z[n + h, wq] & mq) != zero:
                sub[h, cz >> 6] |= one << np.uint64(cz & 63)
    return gf2_rank_words(sub, n_cols)
