"""Brickwork monitored-circuit driver and reproducible ensembles.

Each step applies an independently sampled two-qubit Clifford on every bond
of the current sublattice (odd steps start at qubit 0, even steps at qubit
1) and then sweeps the register left to right, measuring each qubit in the
Z basis with probability p. Runs default to 4L steps, which is deep enough
to reach the steady state (checked in the tests by comparing against 8L).

Randomness is counter-based: every realization's stream seed is a SplitMix64
hash of (master seed, grid indices, realization index), so ensembles are
reproducible record-for-record no matter how realizations are scheduled.
"""

from __future__ import annotations

import os
import threading
from concurrent.futures import FIRST_COMPLETED, ThreadPoolExecutor, wait
from dataclasses import dataclass
from typing import Callable, Iterable, NamedTuple

import numpy as np

from . import backends as K
from .cliffords import group_table, sample_gate_ids
from .records import DepthRecord
from .structure import build_structure, coarse_grain, depth_report
from .tableau import StabilizerTableau

# Reference location of the volume-law / area-law transition for this
# circuit family; used only as plot/grid annotation metadata.
P_CRITICAL = 0.16

_MASK64 = (1 << 64) - 1


def _splitmix64(v: int) -> int:
    v = (v + 0x9E3779B97F4A7C15) & _MASK64
    v ^= v >> 30
    v = (v * 0xBF58476D1CE4E5B9) & _MASK64
    v ^= v >> 27
    v = (v * 0x94D049BB133111EB) & _MASK64
    v ^= v >> 31
    return v


def mix_seed(*parts: int) -> int:
    """Hash integers into a 64-bit stream seed (order-sensitive)."""
    h = 0
    for p in parts:
        h = _splitmix64(h ^ (int(p) & _MASK64))
    return h


@dataclass(frozen=True)
class CircuitConfig:
    """One monitored-circuit realization."""
    n_qubits: int
    p: float
    steps: int | None = None          # default 4 * n_qubits
    master_seed: int = 0
    realization_index: int = 0
    periodic: bool = False

    def __post_init__(self):
        if self.n_qubits < 1:
            raise ValueError("need at least one qubit")
        if not 0.0 <= self.p <= 1.0:
            raise ValueError("measurement probability must be in [0, 1]")
        if self.steps is not None and self.steps < 1:
            raise ValueError("need at least one step")

    @property
    def resolved_steps(self) -> int:
        return self.steps if self.steps is not None else 4 * self.n_qubits

    @property
    def stream_seed(self) -> int:
        return mix_seed(self.master_seed, self.realization_index)


def brickwork_bonds(n_qubits: int, step: int, periodic: bool = False) -> np.ndarray:
    """Gate bonds for a 1-based step index: odd steps pair (0,1),(2,3),...,
    even steps pair (1,2),(3,4),.... Periodic chains of even length add the
    wrap bond (n-1, 0) to even steps."""
    offset = 0 if step % 2 == 1 else 1
    bonds = [(q, q + 1) for q in range(offset, n_qubits - 1, 2)]
    if periodic and offset == 1 and n_qubits % 2 == 0 and n_qubits >= 2:
        bonds.append((n_qubits - 1, 0))
    return np.array(bonds, dtype=np.int64).reshape(-1, 2)


class RealizationStreams(NamedTuple):
    """Pre-drawn randomness for one realization (consumed positionally)."""
    gate_ids: np.ndarray      # one uniform group index per gate, layer order
    meas_mask: np.ndarray     # (steps, n) uint8: measure qubit q at step t?
    coins: np.ndarray         # (steps, n) uint8 outcome bits, used if random


def realization_streams(config: CircuitConfig) -> RealizationStreams:
    """Draw all randomness for a realization from its stream seed."""
    n = config.n_qubits
    steps = config.resolved_steps
    rng = np.random.default_rng(config.stream_seed)
    n_odd = brickwork_bonds(n, 1, config.periodic).shape[0]
    n_even = brickwork_bonds(n, 2, config.periodic).shape[0]
    odd_steps = (steps + 1) // 2
    total_gates = n_odd * odd_steps + n_even * (steps - odd_steps)
    gate_ids = sample_gate_ids(rng, total_gates)
    meas_mask = (rng.random((steps, n)) < config.p).astype(np.uint8)
    coins = rng.integers(0, 2, size=(steps, n), dtype=np.uint8)
    return RealizationStreams(gate_ids, meas_mask, coins)


def run_realization(config: CircuitConfig) -> StabilizerTableau:
    """Evolve |0...0> through the monitored brickwork circuit."""
    table = group_table()
    streams = realization_streams(config)
    state = StabilizerTableau.new_product_state(config.n_qubits)
    K.run_circuit(state._x, state._z, state._r, config.n_qubits,
                  config.resolved_steps,
                  brickwork_bonds(config.n_qubits, 1, config.periodic),
                  brickwork_bonds(config.n_qubits, 2, config.periodic),
                  streams.gate_ids, table.lut_v, table.lut_f,
                  streams.meas_mask, streams.coins)
    return state


@dataclass(frozen=True)
class EnsembleSpec:
    """A (p, L) grid of steady-state realizations."""
    p_values: tuple[float, ...]
    L_values: tuple[int, ...]
    n_realizations: int = 500
    coarse_b: int = 2
    master_seed: int = 0
    steps_factor: int = 4
    steps_override: int | None = None
    periodic: bool = False

    def __post_init__(self):
        if not self.p_values or not self.L_values:
            raise ValueError("empty p or L grid")
        if self.n_realizations < 1:
            raise ValueError("need at least one realization")
        if self.coarse_b < 1:
            raise ValueError("coarse-graining box must be positive")

    def config_for(self, p_index: int, L_index: int, realization: int) -> CircuitConfig:
        L = self.L_values[L_index]
        steps = self.steps_override if self.steps_override is not None \
            else self.steps_factor * L
        seed = self.realization_seed(p_index, L_index, realization)
        return CircuitConfig(n_qubits=L, p=self.p_values[p_index], steps=steps,
                             master_seed=seed, realization_index=0,
                             periodic=self.periodic)

    def realization_seed(self, p_index: int, L_index: int, realization: int) -> int:
        return mix_seed(self.master_seed, p_index, L_index, realization)

    def tasks(self) -> list[tuple[int, int, int]]:
        return [(pi, li, r)
                for pi in range(len(self.p_values))
                for li in range(len(self.L_values))
                for r in range(self.n_realizations)]


@dataclass
class EnsembleSummary:
    n_records: int
    escalation_events: int


def default_threads() -> int:
    return os.cpu_count() or 1


def run_tasks(tasks: Iterable, worker: Callable, threads: int | None = None,
              progress: Callable[[int, int], None] | None = None) -> list:
    """Run worker(task) over a thread pool, yielding results as a list in
    completion order. Worker failures propagate after cancelling the rest."""
    tasks = list(tasks)
    threads = threads or default_threads()
    results = []
    with ThreadPoolExecutor(max_workers=threads) as pool:
        pending = {pool.submit(worker, t) for t in tasks}
        try:
            while pending:
                done, pending = wait(pending, return_when=FIRST_COMPLETED)
                for fut in done:
                    results.append(fut.result())
                    if progress is not None:
                        progress(len(results), len(tasks))
        except BaseException:
            for fut in pending:
                fut.cancel()
            raise
    return results


class _SinkFailure(Exception):
    def __init__(self, emitted: int):
        super().__init__(emitted)
        self.emitted = emitted


def run_ensemble(spec: EnsembleSpec, sink: Callable[[DepthRecord], None],
                 threads: int | None = None,
                 progress: Callable[[int, int], None] | None = None) -> EnsembleSummary:
    """Run the grid, build the coarse-grained structure of each steady
    state, and emit one DepthRecord per realization to sink.

    Realizations execute in parallel; sink calls are serialized under a
    lock and record content is schedule-independent. A sink failure aborts
    the run with a partial-progress report.
    """
    lock = threading.Lock()
    counts = {"emitted": 0, "escalations": 0}
    total = len(spec.tasks())

    def worker(task):
        pi, li, r = task
        config = spec.config_for(pi, li, r)
        state = run_realization(config)
        elements = coarse_grain(config.n_qubits, spec.coarse_b)
        structure = build_structure(state, elements)
        report = depth_report(structure)
        record = DepthRecord(p=spec.p_values[pi], L=config.n_qubits,
                             realization=r, seed=config.master_seed,
                             depth_qubits=report.depth_qubits,
                             n_clusters=report.n_clusters)
        with lock:
            try:
                sink(record)
            except Exception:
                raise _SinkFailure(counts["emitted"])
            counts["emitted"] += 1
            counts["escalations"] += structure.escalations

    try:
        run_tasks(spec.tasks(), worker, threads, progress)
    except _SinkFailure as failure:
        raise RuntimeError(
            f"record sink failed after {failure.emitted} of {total} records"
        ) from failure.__cause__ or failure.__context__
    return EnsembleSummary(n_records=counts["emitted"],
                           escalation_events=counts["escalations"])
