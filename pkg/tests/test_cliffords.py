"""Group enumeration, sampling uniformity and conjugation-action checks."""

import numpy as np
import pytest

from fracstab.cliffords import (CNOT, CZ, GROUP_SIZE, H_FIRST, IDENTITY, OMEGA,
                                S_FIRST, SWAP, SYMPLECTIC_CLASSES,
                                TwoQubitClifford, group_table,
                                sample_two_qubit_clifford)
from fracstab.dense import (_ELEMENTARY_UNITARIES, clifford_to_unitary,
                            two_qubit_pauli, verify_clifford_unitary)


def _canonical_unitary_key(u: np.ndarray) -> bytes:
    """Phase-normalize a unitary: rotate so the first nonzero entry is
    positive real, then round. Entries of two-qubit Cliffords lie on an
    exact 1/sqrt(2)^k grid, so rounding to 9 decimals is collision-free."""
    flat = u.reshape(-1)
    idx = np.argmax(np.abs(flat) > 1e-9)
    phase = flat[idx] / abs(flat[idx])
    normed = np.round(u / phase, 9) + 0.0
    return normed.tobytes()


def test_group_size_matches_unitary_closure():
    """Independent oracle: BFS over dense 4x4 unitaries modulo phase."""
    gens = [_ELEMENTARY_UNITARIES[k] for k in
            ("h_first", "h_second", "s_first", "s_second", "cnot")]
    seen = {_canonical_unitary_key(np.eye(4, dtype=np.complex128))}
    frontier = [np.eye(4, dtype=np.complex128)]
    while frontier:
        nxt = []
        for u in frontier:
            for g in gens:
                cand = g @ u
                key = _canonical_unitary_key(cand)
                if key not in seen:
                    seen.add(key)
                    nxt.append(cand)
        frontier = nxt
    assert len(seen) == GROUP_SIZE == 11520
    assert group_table().size == len(seen)


def test_symplectic_class_count():
    assert group_table().n_classes == SYMPLECTIC_CLASSES == 720


def test_identity_element():
    table = group_table()
    assert table.id_of(IDENTITY) == 0
    assert np.array_equal(IDENTITY.images, [1, 2, 4, 8])
    assert not IDENTITY.sign_flips.any()


def test_sampling_chi2_uniform_over_classes():
    """1e6 draws over the 720 symplectic classes pass chi^2 at 0.01."""
    from scipy.stats import chi2

    table = group_table()
    rng = np.random.default_rng(20240817)
    ids = rng.integers(table.size, size=1_000_000)
    counts = np.bincount(table.class_ids[ids], minlength=table.n_classes)
    expected = len(ids) / table.n_classes
    stat = float(((counts - expected) ** 2 / expected).sum())
    threshold = chi2.ppf(0.99, table.n_classes - 1)
    assert stat < threshold, (stat, threshold)


def test_sampled_gates_preserve_symplectic_form(rng):
    for _ in range(200):
        g = sample_two_qubit_clifford(rng)
        m = g.symplectic.astype(int)
        assert np.array_equal((m @ OMEGA @ m.T) % 2, OMEGA)


def test_invalid_symplectic_rejected():
    bad = np.eye(4, dtype=np.uint8)
    bad[0, 0] = 0  # drops rank; cannot preserve the form
    with pytest.raises(ValueError):
        TwoQubitClifford(bad, np.zeros(4, dtype=np.uint8))


def test_elementary_actions():
    # H: X<->Z, Y -> -Y; S: X -> Y, Y -> -X; CNOT: X1 -> X1X2, Z2 -> Z1Z2
    lv, lf = H_FIRST.luts()
    assert lv[1] == 2 and lv[2] == 1 and lv[3] == 3 and lf[3] == 1
    lv, lf = S_FIRST.luts()
    assert lv[1] == 3 and lf[1] == 0 and lv[3] == 1 and lf[3] == 1
    lv, lf = CNOT.luts()
    assert lv[1] == 5 and lv[8] == 10 and lv[2] == 2 and lv[4] == 4
    lv, lf = SWAP.luts()
    assert lv[1] == 4 and lv[2] == 8 and lv[4] == 1 and lv[8] == 2


def test_lut_matches_dense_conjugation(rng):
    """Full 15-Pauli conjugation check against dense unitaries."""
    for _ in range(25):
        gate = sample_two_qubit_clifford(rng)
        u = clifford_to_unitary(gate)
        lv, lf = gate.luts()
        for v in range(1, 16):
            got = u @ two_qubit_pauli(v) @ u.conj().T
            want = (-1.0 if lf[v] else 1.0) * two_qubit_pauli(int(lv[v]))
            assert np.allclose(got, want, atol=1e-10), v


def test_cz_action():
    lv, lf = CZ.luts()
    assert lv[1] == 9 and lv[4] == 6 and lv[2] == 2 and lv[8] == 8
    verify_clifford_unitary(CZ, clifford_to_unitary(CZ))


def test_table_roundtrip_by_id(rng):
    table = group_table()
    for _ in range(50):
        gid = int(rng.integers(table.size))
        assert table.id_of(table.gate(gid)) == gid
