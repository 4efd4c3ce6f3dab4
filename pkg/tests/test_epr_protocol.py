"""Shared-EPR protocol tests: completeness, deletion, the measure-first
verifier, adversaries, and the witness-free simulator."""

import math

import numpy as np
import pytest

from cenizk.epr import ROLE_V
from cenizk.epr_protocol import (
    BOT,
    EprDeletionCert,
    EprParams,
    delete_then_remeasure_vstar,
    epr_cert,
    epr_delete,
    epr_prove,
    epr_setup,
    epr_sim,
    epr_verify,
    forged_proof_prover,
    greedy_basis_prover,
    honest_delete_vstar,
    hypothetical_verifier,
    premeasure_all_z,
    run_cezk_real,
)
from cenizk.graphs import canonical_cycle, complete_digraph, non_hamiltonian_triangle
from cenizk.hbnizk import HbParams
from cenizk.rng import stream
from conftest import CHI2_CRIT_1DF, chi_square_uniform

TINY = EprParams(hb=HbParams(n=3, repetitions=1, matrix_side=3, block_len=1), block_width=4)
# geometry where useful repetitions (hence deletions) are common: the
# two-vertex statement at matrix_side 2 has useful rate 1/16 per rep
DELETING = EprParams(hb=HbParams(n=2, repetitions=8, matrix_side=2, block_len=1), block_width=2)


def two_vertex_instance():
    from cenizk.graphs import two_cycle_pair

    return two_cycle_pair()


class TestSetup:
    def test_dimensions(self, rng):
        crs, net = epr_setup(TINY, rng)
        assert len(crs.s) == TINY.num_blocks
        assert net.block_count == TINY.num_blocks
        assert net.block_width == TINY.block_width

    def test_s_uniform(self, rng):
        ones = 0
        trials = 3000
        for _ in range(trials):
            crs, _ = epr_setup(TINY, rng)
            ones += int(crs.s[0])
        assert chi_square_uniform([ones, trials - ones]) < CHI2_CRIT_1DF

    def test_network_is_epr(self, rng):
        _, net = epr_setup(TINY, rng)
        assert set(net.pair_state(0, 0).amps) == {0b00, 0b11}


class TestHonestSessions:
    def test_completeness_and_deletion_tiny(self):
        g, w = complete_digraph(3), canonical_cycle(3)
        for trial in range(40):
            rng = stream(trial, "honest")
            crs, net = epr_setup(TINY, rng)
            proof, prover = epr_prove(TINY, crs, net, g, w, rng)
            b, residual = epr_verify(TINY, crs, net, g, proof, rng)
            cert, _ = epr_delete(TINY, residual, rng)
            assert b == 1 and epr_cert(TINY, cert, prover)

    def test_completeness_with_real_deletions(self):
        g, w = two_vertex_instance()
        deletions_seen = 0
        for trial in range(60):
            rng = stream(trial, "honest-del")
            crs, net = epr_setup(DELETING, rng)
            proof, prover = epr_prove(DELETING, crs, net, g, w, rng)
            b, residual = epr_verify(DELETING, crs, net, g, proof, rng)
            cert, _ = epr_delete(DELETING, residual, rng)
            assert b == 1 and epr_cert(DELETING, cert, prover)
            deletions_seen += len(cert.blocks) > 0
        assert deletions_seen > 0  # useful repetitions actually occur here

    def test_hidden_bits_agree_across_parties(self, rng):
        # same-basis EPR correlation: the verifier recomputes exactly the
        # prover's parities on the opened blocks
        g, w = complete_digraph(3), canonical_cycle(3)
        crs, net = epr_setup(TINY, rng)
        proof, prover = epr_prove(TINY, crs, net, g, w, rng)
        theta_I = proof.theta_I
        y_v = net.measure_blocks(ROLE_V, theta_I, rng, blocks=proof.I)
        assert np.array_equal(y_v, prover.y[proof.I])

    def test_r_marginal_uniform_over_runs(self, rng):
        g, w = complete_digraph(3), canonical_cycle(3)
        ones = 0
        trials = 2000
        for _ in range(trials):
            crs, net = epr_setup(TINY, rng)
            _, prover = epr_prove(TINY, crs, net, g, w, rng)
            t0 = int(np.bitwise_xor.reduce(prover.y[0][prover.theta[0] == 0])) if np.any(prover.theta[0] == 0) else 0
            ones += t0 ^ int(crs.s[0])
        assert chi_square_uniform([ones, trials - ones]) < CHI2_CRIT_1DF

    def test_proof_reveals_theta_only_for_opened_blocks(self, rng):
        # basis-privacy precondition: unopened theta never leaves the prover
        g, w = two_vertex_instance()
        crs, net = epr_setup(DELETING, rng)
        proof, prover = epr_prove(DELETING, crs, net, g, w, rng)
        assert proof.theta_I.shape == (len(proof.I), DELETING.block_width)
        from cenizk.hbg import SubsetOpening

        if isinstance(proof.op_I, SubsetOpening):
            allowed = set()
            for i in proof.I:
                allowed.update(range(i * DELETING.block_width, (i + 1) * DELETING.block_width))
            assert set(int(p) for p in proof.op_I.positions) <= allowed


class TestDeletion:
    def test_cert_dimensions(self, rng):
        g, w = two_vertex_instance()
        crs, net = epr_setup(DELETING, rng)
        proof, prover = epr_prove(DELETING, crs, net, g, w, rng)
        _, residual = epr_verify(DELETING, crs, net, g, proof, rng)
        cert, _ = epr_delete(DELETING, residual, rng)
        assert cert.outcomes.shape == (len(cert.blocks), DELETING.block_width)

    def test_flipped_cert_bit_at_hadamard_position(self):
        g, w = two_vertex_instance()
        for trial in range(300):
            rng = stream(trial, "flip")
            crs, net = epr_setup(DELETING, rng)
            proof, prover = epr_prove(DELETING, crs, net, g, w, rng)
            _, residual = epr_verify(DELETING, crs, net, g, proof, rng)
            cert, _ = epr_delete(DELETING, residual, rng)
            if len(cert.blocks) == 0:
                continue
            theta_rows = prover.theta[cert.blocks]
            hadamard = np.argwhere(theta_rows == 1)
            computational = np.argwhere(theta_rows == 0)
            if len(hadamard):
                bad = cert.outcomes.copy()
                bi, bj = hadamard[0]
                bad[bi, bj] ^= 1
                assert not epr_cert(DELETING, EprDeletionCert(cert.blocks, bad), prover)
            if len(computational):
                ignored = cert.outcomes.copy()
                ci, cj = computational[0]
                ignored[ci, cj] ^= 1
                assert epr_cert(DELETING, EprDeletionCert(cert.blocks, ignored), prover)
            return  # one deleting trial is enough
        pytest.fail("no trial produced a deletion")

    def test_missing_block_rejected(self, rng):
        g, w = two_vertex_instance()
        for trial in range(300):
            rng2 = stream(trial, "missing")
            crs, net = epr_setup(DELETING, rng2)
            proof, prover = epr_prove(DELETING, crs, net, g, w, rng2)
            _, residual = epr_verify(DELETING, crs, net, g, proof, rng2)
            cert, _ = epr_delete(DELETING, residual, rng2)
            if len(cert.blocks) == 0:
                continue
            short = EprDeletionCert(cert.blocks[:-1], cert.outcomes[:-1])
            assert not epr_cert(DELETING, short, prover)
            return
        pytest.fail("no trial produced a deletion")

    def test_z_basis_cheat_rate_matches_analytic(self):
        """Deleting in Z instead of Hadamard passes per block with
        probability 2^-wt(theta_i); compare against the analytic value
        averaged over the observed theta rows."""
        g, w = two_vertex_instance()
        passes = 0
        expected = 0.0
        blocks_seen = 0
        for trial in range(4000):
            rng = stream(trial, "zcheat")
            crs, net = epr_setup(DELETING, rng)
            proof, prover = epr_prove(DELETING, crs, net, g, w, rng)
            _, residual = epr_verify(DELETING, crs, net, g, proof, rng)
            from cenizk.epr_protocol import _unopened_blocks

            unopened = _unopened_blocks(DELETING.num_blocks, residual.I)
            if len(unopened) == 0:
                continue
            bases = np.zeros((len(unopened), DELETING.block_width), dtype=np.int8)
            z_out = net.measure_blocks(ROLE_V, bases, rng, blocks=unopened)
            theta_rows = prover.theta[unopened]
            match = (z_out == prover.y[unopened]) | (theta_rows == 0)
            per_block = match.all(axis=1)
            passes += int(per_block.sum())
            blocks_seen += len(unopened)
            expected += float(np.sum(2.0 ** (-theta_rows.sum(axis=1).astype(np.int64))))
        assert blocks_seen > 100
        sigma = math.sqrt(blocks_seen) * 0.5
        assert abs(passes - expected) <= 3 * sigma


class TestHypotheticalVerifier:
    def test_agrees_with_real_verifier_on_honest_runs(self):
        g, w = complete_digraph(3), canonical_cycle(3)
        for trial in range(200):
            rng = stream(trial, "agree")
            crs, net = epr_setup(TINY, rng)
            proof, _ = epr_prove(TINY, crs, net, g, w, rng)
            b_real, _ = epr_verify(TINY, crs, net, g, proof, rng)
            # a fresh network with the same seed path for the paired run
            rng2 = stream(trial, "agree")
            crs2, net2 = epr_setup(TINY, rng2)
            proof2, _ = epr_prove(TINY, crs2, net2, g, w, rng2)
            b_tilde = hypothetical_verifier(TINY, crs2, net2, g, proof2, rng2)
            assert b_real == b_tilde == 1

    def test_measure_first_commutes_with_prover(self):
        """Verdict distribution of the greedy adversary is unchanged by
        whether the verifier pre-measures before or after the prover."""
        bad = non_hamiltonian_triangle()
        params = EprParams(hb=HbParams(n=3, repetitions=1, matrix_side=3, block_len=1), block_width=4)
        first, after = 0, 0
        trials = 1200
        for trial in range(trials):
            rng = stream(trial, "order-first")
            crs, net = epr_setup(params, rng)
            premeasure_all_z(params, net, rng)  # measure-first
            proof = greedy_basis_prover(params, crs, net, bad, rng, genbits_tries=1)
            first += hypothetical_verifier(params, crs, net, bad, proof, rng)

            rng = stream(trial, "order-after")
            crs, net = epr_setup(params, rng)
            proof = greedy_basis_prover(params, crs, net, bad, rng, genbits_tries=1)
            after += hypothetical_verifier(params, crs, net, bad, proof, rng)
        p = (first + after) / (2 * trials)
        sigma = math.sqrt(max(2 * p * (1 - p) / trials, 1e-9))
        assert abs(first - after) / trials <= 4 * sigma + 0.02


class TestAdversaries:
    def test_forged_prover_always_rejected(self):
        bad = non_hamiltonian_triangle()
        for trial in range(100):
            rng = stream(trial, "forge")
            crs, net = epr_setup(TINY, rng)
            premeasure_all_z(TINY, net, rng)
            proof = forged_proof_prover(TINY, crs, net, bad, rng)
            assert hypothetical_verifier(TINY, crs, net, bad, proof, rng) == 0

    def test_greedy_prover_rejected_at_rho_20(self):
        bad = non_hamiltonian_triangle()
        params = EprParams(hb=HbParams(n=3, repetitions=20, matrix_side=3, block_len=1), block_width=4)
        accepted = 0
        for trial in range(60):
            rng = stream(trial, "greedy20")
            crs, net = epr_setup(params, rng)
            premeasure_all_z(params, net, rng)
            proof = greedy_basis_prover(params, crs, net, bad, rng)
            accepted += hypothetical_verifier(params, crs, net, bad, proof, rng)
        assert accepted == 0


class TestCeZk:
    def test_real_and_sim_both_run(self, rng):
        g, w = complete_digraph(3), canonical_cycle(3)
        out, _, _ = run_cezk_real(TINY, g, w, honest_delete_vstar, rng)
        assert out != BOT and out["verdict"] == 1
        out2, _, _ = epr_sim(TINY, g, honest_delete_vstar, rng)
        assert out2 != BOT and out2["verdict"] == 1

    def test_sim_never_touches_witness(self):
        # structural: the simulator signature has no witness parameter
        import inspect

        sig = inspect.signature(epr_sim)
        assert "witness" not in sig.parameters

    def test_bot_rates_match(self):
        # under the honest-delete verifier both experiments certify always
        g, w = complete_digraph(3), canonical_cycle(3)
        bot_real = bot_sim = 0
        for trial in range(400):
            out, _, _ = run_cezk_real(TINY, g, w, honest_delete_vstar, stream(trial, "br"))
            bot_real += out == BOT
            out, _, _ = epr_sim(TINY, g, honest_delete_vstar, stream(trial, "bs"))
            bot_sim += out == BOT
        assert bot_real == bot_sim == 0

    def test_remeasure_vstar_also_certifies(self, rng):
        g, w = two_vertex_instance()
        out, _, _ = run_cezk_real(DELETING, g, w, delete_then_remeasure_vstar, rng)
        assert out != BOT

    def test_tv_real_vs_sim_small(self):
        # module-scale version of the acceptance experiment
        g, w = complete_digraph(3), canonical_cycle(3)
        real: dict = {}
        sim: dict = {}
        trials = 1500
        for trial in range(trials):
            out, _, _ = run_cezk_real(TINY, g, w, honest_delete_vstar, stream(trial, "tvr"))
            key = BOT if out == BOT else (out["verdict"], out["cert_blocks"], out["cert_bits"])
            real[key] = real.get(key, 0) + 1
            out, _, _ = epr_sim(TINY, g, honest_delete_vstar, stream(trial, "tvs"))
            key = BOT if out == BOT else (out["verdict"], out["cert_blocks"], out["cert_bits"])
            sim[key] = sim.get(key, 0) + 1
        keys = set(real) | set(sim)
        tv = 0.5 * sum(abs(real.get(k, 0) - sim.get(k, 0)) for k in keys) / trials
        assert tv <= 0.08
