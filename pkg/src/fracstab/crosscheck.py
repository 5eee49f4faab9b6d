"""Coupled tableau/statevector runs for oracle validation.

Both simulators consume the identical gate-id stream, measurement sites and
outcome coins (coins are indexed by (step, qubit), so consumption order
cannot drift). After evolution the fast GF(2) entropies are compared
against dense Schmidt entropies on every proper subset, and the cluster
decompositions computed from either entropy source must coincide.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from . import backends as K
from .circuit import CircuitConfig, brickwork_bonds, realization_streams, run_realization
from .cliffords import group_table
from .dense import DenseState, clifford_to_unitary
from .structure import build_structure, singleton_elements
from .tableau import StabilizerTableau


def run_dense_realization(config: CircuitConfig) -> DenseState:
    """Replay a realization's exact randomness through the dense simulator."""
    streams = realization_streams(config)
    table = group_table()
    unitaries: dict[int, np.ndarray] = {}
    state = DenseState.product_state(config.n_qubits)
    g = 0
    for t in range(1, config.resolved_steps + 1):
        bonds = brickwork_bonds(config.n_qubits, t, config.periodic)
        for i, j in bonds:
            gid = int(streams.gate_ids[g])
            g += 1
            u = unitaries.get(gid)
            if u is None:
                u = clifford_to_unitary(table.gate(gid))
                unitaries[gid] = u
            state.apply_two_qubit(u, int(i), int(j))
        for q in range(config.n_qubits):
            if streams.meas_mask[t - 1, q]:
                state.measure_z(q, coin=int(streams.coins[t - 1, q]))
    return state


@dataclass
class CrosscheckReport:
    config: CircuitConfig
    entropy_mismatches: list[tuple[tuple[int, ...], int, float]] = field(default_factory=list)
    max_rounding_error: float = 0.0
    partitions_agree: bool = True

    @property
    def ok(self) -> bool:
        return not self.entropy_mismatches and self.partitions_agree \
            and self.max_rounding_error <= 1e-9

    def describe(self) -> str:
        if self.ok:
            return "ok"
        parts = []
        if self.entropy_mismatches:
            subset, fast, dense = self.entropy_mismatches[0]
            parts.append(f"{len(self.entropy_mismatches)} subset entropy "
                         f"mismatches (first: {subset} fast={fast} dense={dense:.6f})")
        if self.max_rounding_error > 1e-9:
            parts.append(f"dense entropies off-integer by {self.max_rounding_error:.3g}")
        if not self.partitions_agree:
            parts.append("cluster partitions differ")
        return "; ".join(parts)


def crosscheck_realization(config: CircuitConfig) -> CrosscheckReport:
    """Drive both simulators through one realization and compare every
    proper-subset entropy plus the singleton-element cluster partition."""
    n = config.n_qubits
    fast_state = run_realization(config)
    dense_state = run_dense_realization(config)
    report = CrosscheckReport(config)

    fast_entropy: dict[tuple[int, ...], int] = {}
    dense_entropy: dict[tuple[int, ...], int] = {}
    for size in range(1, n):
        for subset in itertools.combinations(range(n), size):
            fast = fast_state.subset_entropy(subset)
            raw = dense_state.entropy(subset)
            rounded = int(round(raw))
            report.max_rounding_error = max(report.max_rounding_error,
                                            abs(raw - rounded))
            fast_entropy[subset] = fast
            dense_entropy[subset] = rounded
            if fast != rounded:
                report.entropy_mismatches.append((subset, fast, raw))

    full = tuple(range(n))
    fast_entropy[full] = fast_state.subset_entropy(full)
    dense_entropy[full] = int(round(dense_state.entropy(full)))

    fast_parts = build_structure(None, singleton_elements(n),
                                 entropy_fn=lambda qs: fast_entropy[tuple(qs)])
    dense_parts = build_structure(None, singleton_elements(n),
                                  entropy_fn=lambda qs: dense_entropy[tuple(qs)])
    fast_sets = {frozenset(e.qubits) for e in fast_parts.final_clusters}
    dense_sets = {frozenset(e.qubits) for e in dense_parts.final_clusters}
    report.partitions_agree = fast_sets == dense_sets
    return report


def coupled_outcome_replay(config: CircuitConfig) -> tuple[list[int], list[int]]:
    """Measurement outcome sequences from both simulators under one shared
    coin stream; they must be identical."""
    streams = realization_streams(config)
    table = group_table()
    n = config.n_qubits
    fast = StabilizerTableau.new_product_state(n)
    dense = DenseState.product_state(n)
    fast_log: list[int] = []
    dense_log: list[int] = []
    g = 0
    for t in range(1, config.resolved_steps + 1):
        bonds = brickwork_bonds(n, t, config.periodic)
        for i, j in bonds:
            gid = int(streams.gate_ids[g])
            g += 1
            gate = table.gate(gid)
            fast.apply_clifford2(gate, int(i), int(j))
            dense.apply_two_qubit(clifford_to_unitary(gate), int(i), int(j))
        for q in range(n):
            if streams.meas_mask[t - 1, q]:
                coin = int(streams.coins[t - 1, q])
                value, _ = K.measure(fast._x, fast._z, fast._r, n, q, coin)
                fast_log.append(int(value))
                dense_log.append(dense.measure_z(q, coin=coin).value)
    return fast_log, dense_log
