"""Stabilizer tableau semantics: gates, measurements, entropies, format."""

import itertools

import numpy as np
import pytest

from fracstab.cliffords import CNOT, H_FIRST, SWAP, sample_two_qubit_clifford
from fracstab.dense import DenseState
from fracstab.tableau import MeasurementOutcome, StabilizerTableau, new_product_state

from .states import bell_pair, ghz, random_circuit_state


def stabilizer_groups_equal(a: StabilizerTableau, b: StabilizerTableau) -> bool:
    """Same stabilizer group (signs included): every generator of one is a
    product of generators of the other and vice versa."""
    if a.n != b.n:
        return False
    if a.to_text() == b.to_text():
        return True
    da = DenseState.from_tableau(a)
    db = DenseState.from_tableau(b)
    return abs(abs(np.vdot(da.amplitudes, db.amplitudes)) - 1) < 1e-9


class TestProductState:
    def test_generators_are_plus_z(self):
        for n in (1, 3):
            s = new_product_state(n)
            assert np.array_equal(s.x_bits, np.zeros((n, n)))
            assert np.array_equal(s.z_bits, np.eye(n))
            assert not s.signs.any()
            s.validate()

    def test_zero_qubits_rejected(self):
        with pytest.raises(ValueError):
            new_product_state(0)

    def test_every_subset_entropy_zero(self):
        s = new_product_state(6)
        for size in range(1, 6):
            for subset in itertools.combinations(range(6), size):
                assert s.subset_entropy(subset) == 0


class TestGates:
    def test_cnot_fixes_computational_basis(self, rng):
        s = new_product_state(2)
        s.apply_clifford2(CNOT, 0, 1)
        # same state: generators regroup to {Z0, Z0Z1} but the group and
        # all outcomes are those of |00>
        assert not s.x_bits.any()
        assert not s.signs.any()
        assert stabilizer_groups_equal(s, new_product_state(2))
        assert s.measure_z(0, rng) == MeasurementOutcome(0, True)
        assert s.measure_z(1, rng) == MeasurementOutcome(0, True)

    def test_cnot_spreads_x(self):
        # X0 stabilizer (|+> on qubit 0) becomes X0 X1
        s = new_product_state(2)
        s.apply_clifford2(H_FIRST, 0, 1)
        s.apply_clifford2(CNOT, 0, 1)
        assert s.subset_entropy([0]) == 1
        ref = bell_pair()
        assert stabilizer_groups_equal(s, ref)

    def test_bell_pair_entropies(self):
        s = bell_pair()
        assert s.subset_entropy([0]) == 1
        assert s.subset_entropy([1]) == 1
        assert s.subset_entropy([0, 1]) == 0

    def test_bad_qubits_rejected(self):
        s = new_product_state(3)
        with pytest.raises(ValueError):
            s.apply_clifford2(CNOT, 1, 1)
        with pytest.raises(IndexError):
            s.apply_clifford2(CNOT, 0, 3)

    def test_swap_relabels(self):
        s = ghz(3)
        t = s.copy().apply_clifford2(SWAP, 0, 2)
        assert stabilizer_groups_equal(t, s.permute_qubits([2, 1, 0]))


class TestMeasurement:
    def test_z_eigenstate_deterministic(self, rng):
        s = new_product_state(1)
        out = s.measure_z(0, rng)
        assert out == MeasurementOutcome(0, True)
        assert np.array_equal(s.z_bits, np.eye(1))

    def test_plus_state_is_fair_coin(self, rng):
        ones = 0
        trials = 4000
        for _ in range(trials):
            s = new_product_state(2)
            s.apply_clifford2(H_FIRST, 0, 1)
            out = s.measure_z(0, rng)
            assert not out.was_deterministic
            ones += out.value
            # post-measurement state is +-Z0, +Z1
            assert np.array_equal(s.x_bits, np.zeros((2, 2)))
        sigma = (trials * 0.25) ** 0.5
        assert abs(ones - trials / 2) < 3 * sigma

    def test_bell_pair_outcomes_correlate(self, rng):
        for _ in range(40):
            s = bell_pair()
            first = s.measure_z(0, rng)
            second = s.measure_z(1, rng)
            assert not first.was_deterministic
            assert second.was_deterministic
            assert first.value == second.value

    def test_repeat_measurement_is_stable(self, rng):
        for _ in range(30):
            s = random_circuit_state(5, 12, 0.2, rng)
            q = int(rng.integers(5))
            first = s.measure_z(q, rng)
            again = s.measure_z(q, rng)
            assert again.was_deterministic
            assert again.value == first.value

    def test_out_of_range(self, rng):
        with pytest.raises(IndexError):
            new_product_state(2).measure_z(5, rng)


class TestEntropy:
    def test_ghz_cut_entropy_is_one(self):
        s = ghz(4)
        assert s.subset_entropy([0, 1]) == 1
        assert s.subset_entropy([0]) == 1
        assert s.subset_entropy([0, 1, 2]) == 1

    def test_complement_symmetry(self, rng):
        for _ in range(15):
            s = random_circuit_state(7, 25, 0.25, rng)
            for _ in range(8):
                size = int(rng.integers(1, 7))
                subset = tuple(sorted(rng.choice(7, size=size, replace=False)))
                comp = tuple(q for q in range(7) if q not in subset)
                assert s.subset_entropy(subset) == s.subset_entropy(comp)

    def test_bounds_and_integrality(self, rng):
        for _ in range(15):
            s = random_circuit_state(6, 20, 0.3, rng)
            for size in range(1, 6):
                subset = tuple(sorted(rng.choice(6, size=size, replace=False)))
                value = s.subset_entropy(subset)
                assert isinstance(value, int)
                assert 0 <= value <= min(size, 6 - size)

    def test_gate_inside_subset_preserves_entropy(self, rng):
        for _ in range(20):
            s = random_circuit_state(8, 25, 0.2, rng)
            subset = (1, 2, 5)
            before = s.subset_entropy(subset)
            inside = rng.choice(subset, size=2, replace=False)
            s.apply_clifford2(sample_two_qubit_clifford(rng),
                              int(inside[0]), int(inside[1]))
            assert s.subset_entropy(subset) == before
            outside = rng.choice([0, 3, 4, 6, 7], size=2, replace=False)
            s.apply_clifford2(sample_two_qubit_clifford(rng),
                              int(outside[0]), int(outside[1]))
            assert s.subset_entropy(subset) == before

    def test_full_register_entropy_zero(self, rng):
        s = random_circuit_state(5, 15, 0.2, rng)
        assert s.subset_entropy(range(5)) == 0

    def test_empty_subset_rejected(self):
        with pytest.raises(ValueError):
            new_product_state(3).subset_entropy([])

    def test_matches_dense_oracle_on_random_circuits(self, rng):
        for _ in range(8):
            s = random_circuit_state(6, 18, 0.25, rng)
            d = DenseState.from_tableau(s)
            for size in range(1, 6):
                for subset in itertools.combinations(range(6), size):
                    dense = d.entropy(subset)
                    assert abs(dense - round(dense)) < 1e-9
                    assert s.subset_entropy(subset) == round(dense)


class TestTotalCorrelation:
    def test_ghz3_singletons(self):
        assert ghz(3).total_correlation([[0], [1], [2]]) == 3

    def test_bell_plus_idle(self):
        s = bell_pair(3)
        assert s.total_correlation([[0], [1], [2]]) == 2

    def test_single_part_is_zero(self, rng):
        s = random_circuit_state(5, 15, 0.2, rng)
        assert s.total_correlation([[0, 3]]) == 0

    def test_permutation_invariant(self, rng):
        s = random_circuit_state(6, 20, 0.2, rng)
        parts = [[0, 1], [2], [4, 5]]
        base = s.total_correlation(parts)
        assert s.total_correlation(parts[::-1]) == base
        assert base >= 0

    def test_overlap_rejected(self):
        with pytest.raises(ValueError):
            ghz(3).total_correlation([[0, 1], [1, 2]])


class TestTextFormat:
    def test_golden_product_state(self):
        assert new_product_state(2).to_text() == "L=2\n00100\n00010\n"

    def test_roundtrip(self, rng):
        for _ in range(10):
            s = random_circuit_state(6, 20, 0.3, rng)
            text = s.to_text()
            back = StabilizerTableau.from_text(text)
            assert back.to_text() == text
            back.validate()

    def test_rejects_malformed(self):
        with pytest.raises(ValueError):
            StabilizerTableau.from_text("nonsense\n")
        with pytest.raises(ValueError):
            StabilizerTableau.from_text("L=2\n00100\n")
        with pytest.raises(ValueError):
            # anticommuting rows: X0, Z0
            StabilizerTableau.from_text("L=2\n10000\n10100\n")

    def test_rejects_dependent_generators(self):
        with pytest.raises(ValueError):
            StabilizerTableau.from_text("L=2\n00100\n00101\n")


class TestValidate:
    def test_detects_corruption(self, rng):
        s = random_circuit_state(5, 15, 0.2, rng)
        s.validate()
        # duplicate one stabilizer row onto another: rank drops
        s._x[s.n + 1] = s._x[s.n]
        s._z[s.n + 1] = s._z[s.n]
        with pytest.raises(ValueError):
            s.validate()

    def test_fuzz_invariants_small(self, rng):
        # a light version of the acceptance fuzz criterion
        for _ in range(200):
            n = int(rng.integers(2, 7))
            s = random_circuit_state(n, int(rng.integers(5, 25)), 0.3, rng)
            s.validate()


def test_permute_qubits_moves_entropy(rng):
    s = random_circuit_state(6, 20, 0.0, rng)
    perm = rng.permutation(6)
    t = s.permute_qubits(perm)
    t.validate()
    for subset in ((0,), (1, 4), (0, 2, 5)):
        mapped = tuple(sorted(int(perm[q]) for q in subset))
        assert t.subset_entropy(mapped) == s.subset_entropy(subset)
