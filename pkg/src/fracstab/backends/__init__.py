"""Kernel backend selection.

The hot kernels exist twice: numba-jitted (default) and pure numpy. The
active backend is picked at import from the FRACSTAB_BACKEND environment
variable ("auto", "numba" or "numpy") and can be switched programmatically
with set_backend(); switching is not thread-safe and should happen before
any simulation work starts.
"""

from __future__ import annotations

import os
from importlib import import_module
from typing import Any

_ENV_VAR = "FRACSTAB_BACKEND"
_impl: Any = None
_impl_name = ""


def _load(name: str):
    if name == "numpy":
        return import_module("fracstab.backends.numpy_kernels")
    if name == "numba":
        return import_module("fracstab.backends.numba_kernels")
    raise ValueError(f"unknown backend {name!r} (expected 'numba' or 'numpy')")


def get_backend(name: str):
    """Return a kernel module without changing the active selection."""
    return _load(name)


def set_backend(name: str) -> str:
    """Select the active kernel backend; returns the resolved name."""
    global _impl, _impl_name
    if name == "auto":
        try:
            _impl = _load("numba")
        except ImportError:
            _impl = _load("numpy")
    else:
        _impl = _load(name)
    _impl_name = _impl.BACKEND_NAME
    return _impl_name


def active_backend() -> str:
    """Name of the backend currently in use."""
    return _impl_name


set_backend(os.environ.get(_ENV_VAR, "auto"))


def apply_gate(x, z, r, n, lut_v, lut_f, i, j):
    return _impl.apply_gate(x, z, r, n, lut_v, lut_f, i, j)


def measure(x, z, r, n, q, coin):
    return _impl.measure(x, z, r, n, q, coin)


def run_circuit(x, z, r, n, steps, bonds_odd, bonds_even, gate_ids,
                lut_v, lut_f, meas_mask, coins):
    return _impl.run_circuit(x, z, r, n, steps, bonds_odd, bonds_even,
                             gate_ids, lut_v, lut_f, meas_mask, coins)


def gf2_rank_words(rows, n_cols):
    return _impl.gf2_rank_words(rows, n_cols)


def subset_rank(x, z, n, qubits):
    return _impl.subset_rank(x, z, n, qubits)
