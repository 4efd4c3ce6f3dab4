"""EPR network tests.

The factored per-pair representation is cross-validated against the
generic sparse engine: for every (first role, first basis, second
basis) combination the joint outcome distribution of the two lanes
must agree.
"""

import math

import numpy as np
import pytest

from cenizk.epr import ROLE_P, ROLE_V, prep_epr
from cenizk.state import SimUsageError, SparseState, measure
from conftest import CHI2_CRIT_1DF

SQRT_HALF = math.sqrt(0.5)


def test_fresh_pair_is_epr():
    net = prep_epr(1, 1)
    st = net.pair_state(0, 0)
    assert st.amps[0b00] == pytest.approx(SQRT_HALF)
    assert st.amps[0b11] == pytest.approx(SQRT_HALF)
    assert set(st.amps) == {0b00, 0b11}


def test_every_pair_reduces_to_epr_before_measurement():
    net = prep_epr(3, 2)
    for i in range(3):
        for j in range(2):
            assert set(net.pair_state(i, j).amps) == {0b00, 0b11}


def test_zero_pairs_rejected():
    with pytest.raises(SimUsageError):
        prep_epr(0, 1)


class TestCorrelations:
    def test_same_basis_z_always_agree(self, rng):
        for _ in range(300):
            net = prep_epr(1, 1)
            a = net.measure_blocks(ROLE_P, np.array([[0]]), rng)
            b = net.measure_blocks(ROLE_V, np.array([[0]]), rng)
            assert a[0, 0] == b[0, 0]

    def test_same_basis_x_always_agree(self, rng):
        for _ in range(300):
            net = prep_epr(1, 1)
            a = net.measure_blocks(ROLE_P, np.array([[1]]), rng)
            b = net.measure_blocks(ROLE_V, np.array([[1]]), rng)
            assert a[0, 0] == b[0, 0]

    def test_cross_basis_independent(self, rng):
        # P measured in Z, V in X: the 2x2 joint table must be flat
        counts = np.zeros((2, 2))
        for _ in range(10_000):
            net = prep_epr(1, 1)
            a = net.measure_blocks(ROLE_P, np.array([[0]]), rng)[0, 0]
            b = net.measure_blocks(ROLE_V, np.array([[1]]), rng)[0, 0]
            counts[a, b] += 1
        # chi-square for independence with 1 df on the contingency table
        row = counts.sum(axis=1)
        col = counts.sum(axis=0)
        expected = np.outer(row, col) / counts.sum()
        stat = float(np.sum((counts - expected) ** 2 / expected))
        assert stat < CHI2_CRIT_1DF

    def test_bulk_matches_scalar_semantics(self, rng):
        net = prep_epr(5, 3)
        bases = rng.integers(0, 2, size=(5, 3), dtype=np.int8)
        out1 = net.measure_blocks(ROLE_P, bases, rng)
        # re-measuring the same half in the same bases repeats outcomes
        out2 = net.measure_blocks(ROLE_P, bases, rng)
        assert np.array_equal(out1, out2)


class TestRemeasurement:
    def test_same_basis_idempotent(self, rng):
        net = prep_epr(1, 1)
        a = net.measure_pair_half(ROLE_P, 0, 0, 0, rng)
        assert net.measure_pair_half(ROLE_P, 0, 0, 0, rng) == a

    def test_basis_change_does_not_touch_partner(self, rng):
        for _ in range(200):
            net = prep_epr(1, 1)
            a = net.measure_pair_half(ROLE_P, 0, 0, 0, rng)  # Z collapse
            net.measure_pair_half(ROLE_P, 0, 0, 1, rng)  # X remeasure P
            # V's Z value was fixed by the first collapse
            assert net.measure_pair_half(ROLE_V, 0, 0, 0, rng) == a


class TestCrossValidationAgainstEngine:
    """Joint outcome distributions: factored lane vs generic engine."""

    def _engine_sample(self, b1, b2, rng):
        bell = SparseState(2, {0b00: SQRT_HALF, 0b11: SQRT_HALF})
        out, _ = measure(bell, [0, 1], [b1, b2], rng)
        return int(out[0]), int(out[1])

    def _network_sample(self, b1, b2, rng):
        net = prep_epr(1, 1)
        a = net.measure_pair_half(ROLE_P, 0, 0, 0 if b1 == "Z" else 1, rng)
        b = net.measure_pair_half(ROLE_V, 0, 0, 0 if b2 == "Z" else 1, rng)
        return a, b

    @pytest.mark.parametrize("b1,b2", [("Z", "Z"), ("Z", "X"), ("X", "Z"), ("X", "X")])
    def test_joint_distribution_agreement(self, b1, b2, rng):
        trials = 4000
        engine = np.zeros((2, 2))
        lane = np.zeros((2, 2))
        for _ in range(trials):
            o = self._engine_sample(b1, b2, rng)
            engine[o] += 1
            o = self._network_sample(b1, b2, rng)
            lane[o] += 1
        tv = 0.5 * np.abs(engine - lane).sum() / trials
        # identical distributions: empirical TV over 4 outcomes stays small
        assert tv < 0.05


class TestExtraction:
    def test_half_state_requires_collapse(self, rng):
        net = prep_epr(1, 2)
        with pytest.raises(SimUsageError):
            net.half_state(ROLE_V, [(0, 0)])
        net.measure_blocks(ROLE_P, np.array([[1, 0]]), rng)
        st = net.half_state(ROLE_V, [(0, 0), (0, 1)])
        assert st.num_qubits == 2
        assert st.norm_sq() == pytest.approx(1.0)

    def test_qubit_index_map(self):
        net = prep_epr(3, 4)
        assert net.qubit_index(ROLE_P, 0, 0) == 0
        assert net.qubit_index(ROLE_P, 2, 3) == 11
        assert net.qubit_index(ROLE_V, 0, 0) == 12
        assert net.qubit_index(ROLE_V, 2, 3) == 23
