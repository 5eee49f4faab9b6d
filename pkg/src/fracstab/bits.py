"""Bit-packed GF(2) row storage helpers.

Rows of 0/1 matrices are packed little-bit-first into uint64 words: column c
lives in word c >> 6 at bit c & 63. All hot kernels operate on this layout;
these helpers convert at the (cold) API boundary.
"""

from __future__ import annotations

import numpy as np


def words_for(n_cols: int) -> int:
    """Number of uint64 words needed to hold n_cols bits per row."""
    return (n_cols + 63) // 64


def pack_rows(bits: np.ndarray) -> np.ndarray:
    """Pack a (m, n_cols) 0/1 matrix into (m, words_for(n_cols)) uint64."""
    bits = np.ascontiguousarray(bits, dtype=np.uint8)
    if bits.ndim != 2:
        raise ValueError("expected a 2-d bit matrix")
    m, n_cols = bits.shape
    n_words = words_for(n_cols)
    padded = np.zeros((m, n_words * 64), dtype=np.uint8)
    padded[:, :n_cols] = bits & 1
    packed = np.packbits(padded, axis=1, bitorder="little")
    return packed.view(np.uint64).reshape(m, n_words)


def unpack_rows(words: np.ndarray, n_cols: int) -> np.ndarray:
    """Inverse of pack_rows; returns a (m, n_cols) uint8 matrix."""
    words = np.ascontiguousarray(words, dtype=np.uint64)
    m = words.shape[0]
    as_bytes = words.reshape(m, -1).view(np.uint8)
    bits = np.unpackbits(as_bytes, axis=1, bitorder="little")
    return bits[:, :n_cols].copy()


def get_bit(words: np.ndarray, row: int, col: int) -> int:
    """Read one bit from a packed matrix."""
    return int((words[row, col >> 6] >> np.uint64(col & 63)) & np.uint64(1))
