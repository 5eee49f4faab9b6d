"""Decomposition of a pure state into decoupled entangled clusters.

Elements (single qubits or coarse-grained boxes) are merged whenever a
group of them carries positive total correlation, until every surviving
cluster has zero entanglement entropy with the rest of the system, i.e. the
state factorizes over the final clusters. Merging is driven purely by an
entropy callback so the same construction runs off either the tableau fast
path or the dense oracle.

Merge policy (fixed for determinism): exhaust pairwise merges to a fixed
point first, merging whole connected components of the pair-correlation
graph per pass; only then probe larger groups, smallest group size first,
scanning candidate subsets in lexicographic element-id order and restarting
the pairwise stage after the first hit. Element ids count up from the
spatially ordered inputs in creation order.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

EntropyFn = Callable[[tuple[int, ...]], int]


@dataclass(frozen=True)
class Element:
    """An indivisible unit of the decomposition: one or more qubits."""
    id: int
    qubits: tuple[int, ...]


@dataclass(frozen=True)
class MergeEvent:
    """A recorded merge: the group level, the member ids, the new id."""
    level: int
    member_ids: tuple[int, ...]
    new_id: int


@dataclass
class EntanglementStructure:
    initial_elements: list[Element]
    final_clusters: list[Element]
    merge_events: list[MergeEvent] = field(default_factory=list)
    escalations: int = 0


@dataclass(frozen=True)
class DepthReport:
    depth_qubits: int
    largest_cluster: tuple[int, ...]
    n_clusters: int


class _UnionFind:
    def __init__(self, keys: Iterable[int]):
        self.parent = {k: k for k in keys}

    def find(self, a: int) -> int:
        p = self.parent
        while p[a] != a:
            p[a] = p[p[a]]
            a = p[a]
        return a

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)


def coarse_grain(n_qubits: int, box_size: int) -> list[Element]:
    """Tile the chain into contiguous boxes of box_size qubits; the last box
    keeps the remainder when box_size does not divide n_qubits."""
    if not 1 <= box_size <= n_qubits:
        raise ValueError("box size must be in [1, n_qubits]")
    elements = []
    for i, start in enumerate(range(0, n_qubits, box_size)):
        stop = min(start + box_size, n_qubits)
        elements.append(Element(i, tuple(range(start, stop))))
    return elements


def singleton_elements(n_qubits: int) -> list[Element]:
    return coarse_grain(n_qubits, 1)


def _check_partition(elements: Sequence[Element], n_qubits: int | None) -> int:
    seen: set[int] = set()
    total = 0
    for e in elements:
        qs = set(e.qubits)
        if len(qs) != len(e.qubits):
            raise ValueError(f"element {e.id} has duplicate qubits")
        if qs & seen:
            raise ValueError("elements overlap")
        seen |= qs
        total += len(qs)
    if n_qubits is not None and total != n_qubits:
        raise ValueError(f"elements cover {total} of {n_qubits} qubits")
    if seen != set(range(total)):
        raise ValueError("elements do not partition the qubit range")
    if len({e.id for e in elements}) != len(elements):
        raise ValueError("element ids are not unique")
    return total


def build_structure(state, elements: Sequence[Element],
                    entropy_fn: EntropyFn | None = None) -> EntanglementStructure:
    """Merge elements into the finest decoupled-cluster partition.

    state is any object with subset_entropy(qubits) -> int; pass
    entropy_fn to override (e.g. with oracle entropies), in which case
    state may be None.
    """
    if entropy_fn is None:
        entropy_fn = lambda qs: state.subset_entropy(qs)  # noqa: E731
    initial = list(elements)
    _check_partition(initial, state.n_qubits if state is not None else None)

    live: dict[int, Element] = {e.id: e for e in initial}
    entropy: dict[int, int] = {}
    for e in initial:
        entropy[e.id] = int(entropy_fn(e.qubits))
    next_id = max(live) + 1 if live else 0
    events: list[MergeEvent] = []
    escalations = 0

    def union_qubits(ids: Sequence[int]) -> tuple[int, ...]:
        qs: list[int] = []
        for i in ids:
            qs.extend(live[i].qubits)
        return tuple(sorted(qs))

    def do_merge(level: int, ids: Sequence[int]) -> None:
        nonlocal next_id
        ids = tuple(sorted(ids))
        merged = Element(next_id, union_qubits(ids))
        events.append(MergeEvent(level, ids, next_id))
        for i in ids:
            del live[i]
            del entropy[i]
        live[next_id] = merged
        entropy[next_id] = int(entropy_fn(merged.qubits))
        next_id += 1

    while True:
        # Pairwise stage: merge connected components of the correlation
        # graph until a pass finds no correlated pair. Elements with zero
        # entropy factor out and can never carry a correlation.
        while True:
            pos = sorted(i for i in live if entropy[i] > 0)
            uf = _UnionFind(pos)
            any_edge = False
            for a, b in itertools.combinations(pos, 2):
                if uf.find(a) == uf.find(b):
                    continue  # already merging this pass; correlation implied or moot
                joint = entropy_fn(union_qubits((a, b)))
                if entropy[a] + entropy[b] - joint > 0:
                    uf.union(a, b)
                    any_edge = True
            if not any_edge:
                break
            groups: dict[int, list[int]] = {}
            for i in pos:
                groups.setdefault(uf.find(i), []).append(i)
            for root in sorted(groups):
                members = groups[root]
                if len(members) > 1:
                    do_merge(2, members)
        if all(s == 0 for s in entropy.values()):
            break
        # Escalation: some elements still carry entropy but no pair
        # correlates; probe growing subset sizes for a correlated group.
        pos = sorted(i for i in live if entropy[i] > 0)
        escalations += 1
        merged = False
        for size in range(3, len(pos) + 1):
            for combo in itertools.combinations(pos, size):
                joint = entropy_fn(union_qubits(combo))
                total = sum(entropy[i] for i in combo)
                if total - joint > 0:
                    do_merge(size, combo)
                    merged = True
                    break
            if merged:
                break
        if not merged:
            # Unreachable: the full positive-entropy set always correlates
            # (its complement is a product of decoupled factors).
            raise AssertionError("no correlated group found among entangled elements")

    final = sorted(live.values(), key=lambda e: min(e.qubits))
    return EntanglementStructure(initial, final, events, escalations)


def depth_report(structure: EntanglementStructure) -> DepthReport:
    """Largest final cluster by qubit count; ties go to the cluster holding
    the smallest qubit index."""
    best = min(structure.final_clusters,
               key=lambda e: (-len(e.qubits), min(e.qubits)))
    return DepthReport(depth_qubits=len(best.qubits),
                       largest_cluster=best.qubits,
                       n_clusters=len(structure.final_clusters))


def largest_cluster(structure: EntanglementStructure) -> Element:
    return min(structure.final_clusters,
               key=lambda e: (-len(e.qubits), min(e.qubits)))


def dump_text(structure: EntanglementStructure) -> str:
    """Cluster listing: one comma-separated qubit line per final cluster in
    spatial order, then one "w=<level>: <ids>" line per merge event."""
    lines = [",".join(map(str, e.qubits)) for e in structure.final_clusters]
    for ev in structure.merge_events:
        lines.append(f"w={ev.level}: " + ",".join(map(str, ev.member_ids)))
    return "\n".join(lines) + "\n"
