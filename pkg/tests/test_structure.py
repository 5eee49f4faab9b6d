"""Cluster decomposition: coarse graining, merging, depth extraction."""

import numpy as np
import pytest

from fracstab.cliffords import CNOT, H_FIRST
from fracstab.structure import (DepthReport, Element, build_structure,
                                coarse_grain, depth_report, dump_text,
                                largest_cluster, singleton_elements)
from fracstab.tableau import new_product_state

from .states import bell_pair, ghz, random_circuit_state, ring_cluster_state


def cluster_sets(structure):
    return {frozenset(e.qubits) for e in structure.final_clusters}


class TestCoarseGrain:
    def test_even_tiling(self):
        boxes = coarse_grain(6, 2)
        assert [e.qubits for e in boxes] == [(0, 1), (2, 3), (4, 5)]
        assert [e.id for e in boxes] == [0, 1, 2]

    def test_remainder_box(self):
        boxes = coarse_grain(7, 3)
        assert [e.qubits for e in boxes] == [(0, 1, 2), (3, 4, 5), (6,)]

    def test_singletons(self):
        assert [e.qubits for e in coarse_grain(5, 1)] == [(q,) for q in range(5)]

    def test_bad_box_size(self):
        with pytest.raises(ValueError):
            coarse_grain(5, 0)
        with pytest.raises(ValueError):
            coarse_grain(5, 6)


class TestBuildStructure:
    def test_two_bell_pairs(self):
        state = bell_pair(4)
        state.apply_clifford2(H_FIRST, 2, 3)
        state.apply_clifford2(CNOT, 2, 3)
        result = build_structure(state, singleton_elements(4))
        assert cluster_sets(result) == {frozenset({0, 1}), frozenset({2, 3})}
        assert all(e.level == 2 for e in result.merge_events)
        assert result.escalations == 0

    def test_ghz_merges_everything(self):
        result = build_structure(ghz(5), singleton_elements(5))
        assert cluster_sets(result) == {frozenset(range(5))}

    def test_product_state_untouched(self):
        result = build_structure(new_product_state(6), singleton_elements(6))
        assert not result.merge_events
        assert len(result.final_clusters) == 6

    def test_non_partition_rejected(self):
        state = new_product_state(4)
        with pytest.raises(ValueError):
            build_structure(state, [Element(0, (0, 1)), Element(1, (1, 2, 3))])
        with pytest.raises(ValueError):
            build_structure(state, [Element(0, (0, 1))])

    def test_every_final_cluster_decoupled(self, rng):
        for _ in range(12):
            state = random_circuit_state(8, 30, 0.3, rng)
            result = build_structure(state, singleton_elements(8))
            for cluster in result.final_clusters:
                assert state.subset_entropy(cluster.qubits) == 0

    def test_idempotent_on_final_clusters(self, rng):
        for _ in range(8):
            state = random_circuit_state(7, 25, 0.3, rng)
            first = build_structure(state, singleton_elements(7))
            reseeded = [Element(i, e.qubits)
                        for i, e in enumerate(first.final_clusters)]
            second = build_structure(state, reseeded)
            assert not second.merge_events
            assert cluster_sets(second) == cluster_sets(first)

    def test_permutation_equivariance(self, rng):
        for _ in range(6):
            state = random_circuit_state(7, 24, 0.25, rng)
            perm = rng.permutation(7)
            base = cluster_sets(build_structure(state, singleton_elements(7)))
            permuted = build_structure(state.permute_qubits(perm),
                                       singleton_elements(7))
            mapped = {frozenset(int(perm[q]) for q in c) for c in base}
            assert cluster_sets(permuted) == mapped

    def test_pairwise_merges_were_connected(self, rng):
        """Replay check: members of each pairwise-stage merge form a
        connected correlation graph (element entropies are time-invariant,
        so connectivity can be checked after the fact)."""
        for _ in range(6):
            state = random_circuit_state(8, 28, 0.3, rng)
            result = build_structure(state, singleton_elements(8))
            catalog = {e.id: e for e in result.initial_elements}
            for event in result.merge_events:
                members = [catalog[i] for i in event.member_ids]
                catalog[event.new_id] = Element(
                    event.new_id,
                    tuple(sorted(q for m in members for q in m.qubits)))
                if event.level != 2:
                    continue
                adjacency = {m.id: set() for m in members}
                for a in members:
                    for b in members:
                        if a.id >= b.id:
                            continue
                        joint = state.subset_entropy(a.qubits + b.qubits)
                        corr = (state.subset_entropy(a.qubits)
                                + state.subset_entropy(b.qubits) - joint)
                        if corr > 0:
                            adjacency[a.id].add(b.id)
                            adjacency[b.id].add(a.id)
                seen = {members[0].id}
                frontier = [members[0].id]
                while frontier:
                    cur = frontier.pop()
                    for nxt in adjacency[cur]:
                        if nxt not in seen:
                            seen.add(nxt)
                            frontier.append(nxt)
                assert seen == set(adjacency)

    def test_ring_cluster_needs_escalation(self):
        """Size-5 ring graph state: no pair of qubits is correlated, so the
        pairwise stage stalls and a 3-element probe must fire."""
        state = ring_cluster_state(5)
        for a in range(5):
            for b in range(a + 1, 5):
                assert state.total_correlation([[a], [b]]) == 0
        result = build_structure(state, singleton_elements(5))
        assert cluster_sets(result) == {frozenset(range(5))}
        assert result.escalations == 1
        assert [e.level for e in result.merge_events] == [3, 2]

    def test_entropy_fn_override(self):
        state = ghz(4)
        lookup = {}
        def spy(qubits):
            value = state.subset_entropy(qubits)
            lookup[tuple(qubits)] = value
            return value
        result = build_structure(None, singleton_elements(4), entropy_fn=spy)
        assert cluster_sets(result) == {frozenset(range(4))}
        assert lookup  # the callback was the only entropy source


class TestDepthReport:
    def test_three_cluster_schematic(self):
        """Twelve qubits split into genuinely multipartite clusters of sizes
        3, 4 and 5: the depth is 5."""
        state = new_product_state(12)
        for block in ((0, 1, 2), (3, 4, 5, 6), (7, 8, 9, 10, 11)):
            state.apply_clifford2(H_FIRST, block[0], block[1])
            for q in block[1:]:
                state.apply_clifford2(CNOT, block[0], q)
        result = build_structure(state, singleton_elements(12))
        report = depth_report(result)
        assert report == DepthReport(5, (7, 8, 9, 10, 11), 3)

    def test_product_depth_one(self):
        result = build_structure(new_product_state(10), singleton_elements(10))
        assert depth_report(result).depth_qubits == 1

    def test_ghz_boxes_count_qubits(self):
        result = build_structure(ghz(6), coarse_grain(6, 2))
        report = depth_report(result)
        assert report.depth_qubits == 6
        assert report.n_clusters == 1

    def test_tie_break_prefers_lowest_index(self):
        state = bell_pair(4, 2, 3)  # bell on (2,3); qubits 0,1 idle
        state2 = state.copy()
        state2.apply_clifford2(H_FIRST, 0, 1)
        state2.apply_clifford2(CNOT, 0, 1)
        result = build_structure(state2, singleton_elements(4))
        report = depth_report(result)
        assert report.depth_qubits == 2
        assert report.largest_cluster == (0, 1)


def test_dump_text_layout():
    state = bell_pair(4)
    state.apply_clifford2(H_FIRST, 2, 3)
    state.apply_clifford2(CNOT, 2, 3)
    result = build_structure(state, singleton_elements(4))
    text = dump_text(result)
    lines = text.splitlines()
    assert lines[0] == "0,1"
    assert lines[1] == "2,3"
    assert lines[2].startswith("w=2: ")


def test_largest_cluster_matches_report(rng):
    state = random_circuit_state(9, 30, 0.25, rng)
    result = build_structure(state, singleton_elements(9))
    assert largest_cluster(result).qubits == depth_report(result).largest_cluster
