"""Hidden-bits NIZK tests.

The usefulness-rate formula is validated two ways: a brute-force
counting oracle enumerating every matrix at small size, and a
two-stage Monte Carlo sampler at the production shape. Soundness of
the useful-claim lane is checked exhaustively over all 2^9 hidden
strings at the smallest geometry.
"""

import math

import numpy as np
import pytest

from cenizk.graphs import (
    CycleWitness,
    canonical_cycle,
    complete_digraph,
    non_hamiltonian_triangle,
)
from cenizk.hbnizk import (
    HbParams,
    RepRevealAll,
    RepUseful,
    amplify,
    bits_to_matrix,
    cheat_prove,
    hb_prove,
    hb_simulate,
    hb_verify,
    useful_probability,
    usefulness,
)
from cenizk.rng import stream

TINY = HbParams(n=3, repetitions=1, matrix_side=3, block_len=1)


def int_block(v, nbits):
    return np.array([(v >> (nbits - 1 - i)) & 1 for i in range(nbits)], dtype=np.uint8)


class TestGraphFileFormat:
    def test_adjacency_list_round_trip(self, tmp_path):
        from cenizk.graphs import load_digraph, save_digraph

        g = non_hamiltonian_triangle()
        path = tmp_path / "g.txt"
        save_digraph(g, path)
        assert path.read_text() == "3\n0 1\n1 0\n2 1\n"
        back = load_digraph(path)
        assert back.n == g.n and np.array_equal(back.adjacency, g.adjacency)

    def test_rejects_empty_file(self, tmp_path):
        path = tmp_path / "empty.txt"
        path.write_text("")
        from cenizk.graphs import load_digraph

        with pytest.raises(ValueError):
            load_digraph(path)


class TestDecodeAndUsefulness:
    def test_slice_all_ones(self):
        m = bits_to_matrix(np.array([1, 1], dtype=np.uint8), 1, 2)
        assert m[0, 0]

    def test_slice_partial(self):
        m = bits_to_matrix(np.array([1, 0], dtype=np.uint8), 1, 2)
        assert not m[0, 0]

    def test_zero_block(self):
        m = bits_to_matrix(np.zeros(9, dtype=np.uint8), 3, 1)
        assert not m.any()

    def test_three_cycle_useful(self):
        mat = np.zeros((3, 3), dtype=bool)
        mat[0, 1] = mat[1, 2] = mat[2, 0] = True
        hidden = usefulness(mat, 3)
        assert hidden is not None
        assert hidden.vertices == (0, 1, 2)

    def test_fixed_points_not_useful(self):
        mat = np.eye(3, dtype=bool)
        assert usefulness(mat, 3) is None

    def test_wrong_count_not_useful(self):
        mat = np.zeros((3, 3), dtype=bool)
        mat[0, 1] = mat[1, 2] = mat[2, 0] = mat[0, 2] = True
        assert usefulness(mat, 3) is None

    def test_disjoint_row_col_sets_not_useful(self):
        # ones in rows {0,1,2} and cols {3,4,5}: a permutation pattern but
        # not a directed cycle on a shared vertex set
        mat = np.zeros((6, 6), dtype=bool)
        mat[0, 4] = mat[1, 5] = mat[2, 3] = True
        assert usefulness(mat, 3) is None


class TestUsefulRate:
    def brute_force_count(self, m, n):
        # independent oracle: enumerate every 0/1 matrix at block_len=1
        count = 0
        cells = m * m
        for v in range(1 << cells):
            mat = np.array([(v >> (cells - 1 - i)) & 1 for i in range(cells)], dtype=bool)
            if usefulness(mat.reshape(m, m), n) is not None:
                count += 1
        return count

    def test_exhaustive_m3(self):
        count = self.brute_force_count(3, 3)
        assert count == 2
        assert useful_probability(3, 1, 3) * 2**9 == pytest.approx(count)

    def test_exhaustive_m4_distinguishes_the_reading(self):
        # C(4,3) * (3-1)! = 8 single directed 3-cycles; the shared-vertex-set
        # requirement is what separates this from larger pattern counts
        count = self.brute_force_count(4, 3)
        assert count == 8
        assert count / 2**16 == pytest.approx(useful_probability(4, 1, 3), rel=1e-12)

    def test_monte_carlo_production_shape(self, rng):
        # two-stage sampler: Binomial one-count filter, then uniform
        # placement of the ones, equivalent to sampling full matrices
        m, b, n = 27, 10, 3
        p = 2.0**-b
        cells = m * m
        trials = 2_000_000
        ones_counts = rng.binomial(cells, p, size=trials)
        hits = 0
        for count in ones_counts:
            if count != n:
                continue
            flat = rng.choice(cells, size=n, replace=False)
            mat = np.zeros((m, m), dtype=bool)
            mat[flat // m, flat % m] = True
            if usefulness(mat, n) is not None:
                hits += 1
        p_hat = hits / trials
        p_true = useful_probability(m, b, n)
        sigma = math.sqrt(p_true * (1 - p_true) / trials)
        assert abs(p_hat - p_true) <= 3 * sigma


class TestProveVerify:
    def test_completeness_exhaustive_tiny(self):
        # all 2^9 hidden strings accept for the complete-triangle witness
        g, w = complete_digraph(3), canonical_cycle(3)
        for v in range(512):
            r = int_block(v, 9)
            I, proof = hb_prove(r, g, w, TINY)
            assert hb_verify(I, r[I], g, proof, TINY)

    def test_completeness_randomized_production(self, rng):
        params = HbParams.defaults(4, 3)
        g, w = complete_digraph(4), canonical_cycle(4)
        for _ in range(3):
            r = rng.integers(0, 2, size=params.total_bits, dtype=np.uint8)
            I, proof = hb_prove(r, g, w, params)
            assert hb_verify(I, r[I], g, proof, params)

    def test_all_not_useful_reveals_everything(self):
        g, w = complete_digraph(3), canonical_cycle(3)
        r = np.zeros(9, dtype=np.uint8)  # zero matrix: not useful
        I, proof = hb_prove(r, g, w, TINY)
        assert isinstance(proof.reps[0], RepRevealAll)
        assert np.array_equal(I, np.arange(9))

    def test_useful_block_opens_non_edges_only(self, rng):
        g, w = complete_digraph(3), canonical_cycle(3)
        # force the useful matrix with cycle 0->1->2->0
        r = np.zeros(9, dtype=np.uint8)
        r[[1, 5, 6]] = 1  # entries (0,1), (1,2), (2,0)
        I, proof = hb_prove(r, g, w, TINY)
        assert isinstance(proof.reps[0], RepUseful)
        # opened entries all decode to zero
        assert not r[I].any()
        # the six statement-edge entries stay closed (K3 has 6 edges)
        assert len(I) == 3

    def test_flipped_opened_bit_rejected_useful(self):
        # useful repetition: every opened entry must decode to zero, so
        # any value flip is caught
        g, w = complete_digraph(3), canonical_cycle(3)
        r = np.zeros(9, dtype=np.uint8)
        r[[1, 5, 6]] = 1
        I, proof = hb_prove(r, g, w, TINY)
        assert isinstance(proof.reps[0], RepUseful)
        for pos in range(len(I)):
            vals = r[I].copy()
            vals[pos] ^= 1
            assert not hb_verify(I, vals, g, proof, TINY)

    def test_flipped_opened_bits_rejected_reveal_all(self):
        # reveal-all repetition: flips are caught when they make the
        # revealed matrix decode as useful
        g, w = complete_digraph(3), canonical_cycle(3)
        r = np.zeros(9, dtype=np.uint8)
        I, proof = hb_prove(r, g, w, TINY)
        assert isinstance(proof.reps[0], RepRevealAll)
        vals = r[I].copy()
        vals[[1, 5, 6]] ^= 1  # now decodes to the 3-cycle: useful
        assert not hb_verify(I, vals, g, proof, TINY)

    def test_invalid_witness_raises(self):
        g = non_hamiltonian_triangle()
        with pytest.raises(ValueError):
            hb_prove(np.zeros(9, dtype=np.uint8), g, CycleWitness((0, 1, 2)), TINY)

    def test_malformed_index_set_rejects(self, rng):
        g, w = complete_digraph(3), canonical_cycle(3)
        r = rng.integers(0, 2, size=9, dtype=np.uint8)
        I, proof = hb_prove(r, g, w, TINY)
        assert not hb_verify(I[::-1], r[I][::-1], g, proof, TINY)  # unsorted
        assert not hb_verify(I + 100, r[I], g, proof, TINY)  # out of range
        assert not hb_verify(I[:-1], r[I][:-1], g, proof, TINY)  # too short

    def test_verifier_never_reads_unopened_bits(self, rng):
        # interface-level guarantee: verdicts depend only on r[I]
        g, w = complete_digraph(3), canonical_cycle(3)
        r = np.zeros(9, dtype=np.uint8)
        r[[1, 5, 6]] = 1
        I, proof = hb_prove(r, g, w, TINY)
        r_scrambled = r.copy()
        unopened = np.setdiff1d(np.arange(9), I)
        r_scrambled[unopened] ^= 1
        assert hb_verify(I, r_scrambled[I], g, proof, TINY)


class TestSoundnessExhaustive:
    def test_no_useful_hidden_string_has_accepting_proof(self):
        """For the fixed non-Hamiltonian instance, whenever the true
        matrix is useful, no claimed map is accepted (all 2^9 strings x
        all 6 injections checked)."""
        import itertools

        bad = non_hamiltonian_triangle()
        params = TINY
        useful_strings = 0
        for v in range(512):
            r = int_block(v, 9)
            hidden = usefulness(bits_to_matrix(r, 3, 1), 3)
            for vmap in itertools.permutations(range(3)):
                from cenizk.hbnizk import HbProof, required_positions

                proof = HbProof((RepUseful(tuple(vmap)),))
                I = required_positions(tuple(vmap), bad, params)
                accepted = hb_verify(I, r[I], bad, proof, params)
                if hidden is not None:
                    assert not accepted, f"useful string {v:09b} accepted via {vmap}"
            if hidden is not None:
                useful_strings += 1
        assert useful_strings == 2

    def test_reveal_all_boundary_documented(self):
        # the complementary fact: a not-useful string always accepts the
        # honest reveal-all answer even for a false statement; this is
        # the analytic (1-q)^rho term excluded from the adversary set
        from cenizk.hbnizk import HbProof

        bad = non_hamiltonian_triangle()
        r = np.zeros(9, dtype=np.uint8)
        proof = HbProof((RepRevealAll(),))
        I = np.arange(9)
        assert hb_verify(I, r[I], bad, proof, TINY)


class TestSimulator:
    def digest(self, I, r_I, proof):
        reps = []
        for rep in proof.reps:
            if isinstance(rep, RepRevealAll):
                reps.append(("all",))
            else:
                reps.append(("useful", rep.vertex_map))
        return (tuple(int(i) for i in I), tuple(int(b) for b in r_I), tuple(reps))

    def test_tv_distance_real_vs_simulated(self, rng):
        g, w = complete_digraph(3), canonical_cycle(3)
        samples = 100_000
        real_counts: dict = {}
        sim_counts: dict = {}
        r_all = rng.integers(0, 2, size=(samples, 9), dtype=np.uint8)
        for i in range(samples):
            r = r_all[i]
            I, proof = hb_prove(r, g, w, TINY)
            key = self.digest(I, r[I], proof)
            real_counts[key] = real_counts.get(key, 0) + 1
            I2, rI2, proof2 = hb_simulate(g, TINY, rng)
            key2 = self.digest(I2, rI2, proof2)
            sim_counts[key2] = sim_counts.get(key2, 0) + 1
        keys = set(real_counts) | set(sim_counts)
        tv = 0.5 * sum(abs(real_counts.get(k, 0) - sim_counts.get(k, 0)) for k in keys) / samples
        assert tv <= 0.05

    def test_not_useful_paths_identical(self, rng):
        # conditioning on a reveal-all repetition, both samplers emit the
        # block verbatim; digests coincide exactly
        g, w = complete_digraph(3), canonical_cycle(3)
        r = np.zeros(9, dtype=np.uint8)
        I, proof = hb_prove(r, g, w, TINY)
        sim_rng = stream(99, "fixed")
        while True:
            I2, rI2, proof2 = hb_simulate(g, TINY, sim_rng)
            if isinstance(proof2.reps[0], RepRevealAll):
                break
        assert isinstance(proof.reps[0], RepRevealAll)
        assert np.array_equal(I, I2)

    def test_opened_index_marginal(self, rng):
        # P[I is the whole string] is the not-useful rate on both sides
        g, w = complete_digraph(3), canonical_cycle(3)
        trials = 20_000
        p_real = 0
        p_sim = 0
        r_all = rng.integers(0, 2, size=(trials, 9), dtype=np.uint8)
        for i in range(trials):
            I, _ = hb_prove(r_all[i], g, w, TINY)
            p_real += len(I) == 9
            I2, _, _ = hb_simulate(g, TINY, rng)
            p_sim += len(I2) == 9
        p = 1 - useful_probability(3, 1, 3)
        sigma = math.sqrt(p * (1 - p) / trials)
        assert abs(p_real / trials - p) <= 3 * sigma
        assert abs(p_sim / trials - p) <= 3 * sigma

    def test_simulated_proofs_verify(self, rng):
        g = complete_digraph(3)
        for _ in range(200):
            I, r_I, proof = hb_simulate(g, TINY, rng)
            assert hb_verify(I, r_I, g, proof, TINY)


class TestAmplify:
    def test_rho_one_is_base(self):
        assert amplify(TINY, 1) == TINY

    def test_completeness_preserved(self, rng):
        params = amplify(TINY, 7)
        g, w = complete_digraph(3), canonical_cycle(3)
        r = rng.integers(0, 2, size=params.total_bits, dtype=np.uint8)
        I, proof = hb_prove(r, g, w, params)
        assert hb_verify(I, r[I], g, proof, params)

    def test_false_statement_amplification(self, rng):
        """Measured single-repetition cheat rate p1; at rho=20 the
        acceptance must sit below p1^20 + 3 sigma (which is essentially
        zero, so: no acceptances)."""
        bad = non_hamiltonian_triangle()
        trials = 3_000
        hits = 0
        for _ in range(trials):
            r = rng.integers(0, 2, size=TINY.total_bits, dtype=np.uint8)
            I, proof, coverable = cheat_prove(r, bad, TINY, rng)
            hits += int(hb_verify(I, r[I], bad, proof, TINY))
        p1 = hits / trials
        assert p1 < 0.25  # tiny-geometry cheat rate sanity bound

        params20 = amplify(TINY, 20)
        accepted = 0
        for _ in range(300):
            r = rng.integers(0, 2, size=params20.total_bits, dtype=np.uint8)
            I, proof, _ = cheat_prove(r, bad, params20, rng)
            accepted += int(hb_verify(I, r[I], bad, proof, params20))
        bound = p1**20 + 3 * math.sqrt(max(p1**20 * (1 - p1**20), 1e-9) / 300)
        assert accepted / 300 <= bound + 3 * math.sqrt(0.25 / 300)

    def test_cheat_accept_iff_all_coverable(self, rng):
        bad = non_hamiltonian_triangle()
        params = amplify(TINY, 3)
        for _ in range(300):
            r = rng.integers(0, 2, size=params.total_bits, dtype=np.uint8)
            I, proof, coverable = cheat_prove(r, bad, params, rng)
            accepted = hb_verify(I, r[I], bad, proof, params)
            assert accepted == (coverable == params.repetitions)
