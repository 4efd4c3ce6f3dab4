"""Command-line surface.

Verbs: setup, prove, verify, delete, certify (staged session replay),
run-session, run-experiment, run-attack, bench. A staged verb re-runs
the session deterministically from (params, seed) up to its stage, so
a transcript file written by an earlier stage can be continued by a
later verb. Exit codes: 0 = all verdicts as expected, 1 = protocol
rejection, 2 = usage error.
"""

from __future__ import annotations

import argparse
import sys
import time

import numpy as np

from . import harness
from .rng import stream

_STAGE_VERBS = ("setup", "prove", "verify", "delete", "certify")


def _parse_params(pairs: list[str] | None) -> dict | None:
    if not pairs:
        return None
    out = {}
    for pair in pairs:
        if "=" not in pair:
            raise ValueError(f"--param expects key=value, got {pair!r}")
        key, value = pair.split("=", 1)
        out[key] = value if not value.lstrip("-").isdigit() else int(value)
    return out


def _merged_params(protocol: str, overrides: dict | None) -> dict:
    base = harness.default_epr_params() if protocol == "epr" else harness.default_crs_params()
    if overrides:
        base.update(overrides)
    return base


def _verdict_exit(transcript: harness.Transcript) -> int:
    values = [bool(v) for v in transcript.verdicts.values()]
    return 0 if all(values) else 1


def _cmd_stage(args, stage: str) -> int:
    if args.infile:
        prev = harness.deserialize_transcript(open(args.infile, "rb").read())
        protocol, params, seed = prev.protocol, prev.params, prev.seed
    else:
        protocol = args.protocol
        params = _merged_params(protocol, _parse_params(args.param))
        seed = args.seed
    if protocol != "epr" and stage == "delete":
        raise ValueError("delete is an EPR-protocol stage")
    transcript = harness.run_session(protocol, params, seed, stop_after=stage)
    data = harness.serialize_transcript(transcript)
    if args.out:
        with open(args.out, "wb") as fh:
            fh.write(data)
    print(harness.transcript_text(transcript))
    return _verdict_exit(transcript)


def _cmd_run_session(args) -> int:
    params = _merged_params(args.protocol, _parse_params(args.param))
    transcript = harness.run_session(args.protocol, params, args.seed)
    data = harness.serialize_transcript(transcript)
    if args.out:
        with open(args.out, "wb") as fh:
            fh.write(data)
    print(harness.transcript_text(transcript))
    return _verdict_exit(transcript)


def _cmd_run_experiment(args) -> int:
    report = harness.run_experiment(args.name, args.trials, _parse_params(args.param), args.seed)
    text = report.text()
    if args.out:
        with open(args.out, "w", encoding="ascii") as fh:
            fh.write(text + "\n")
    print(text)
    return 0


_ATTACKS = ("split-strawman", "split-crs", "clone", "derived-complete", "derived-sound")


def _cmd_run_attack(args) -> int:
    report = harness.run_experiment(args.name, args.trials, _parse_params(args.param), args.seed)
    print(report.text())
    return 0


def _cmd_bench(args) -> int:
    from .epr import prep_epr
    from .state import Bb84Descriptor, measure, prep_bb84

    rng = stream(args.seed, "bench")
    pairs = args.pairs
    # bulk lane: factored network, one vectorized call
    t0 = time.time()
    net = prep_epr(pairs, 1)
    bases = rng.integers(0, 2, size=(pairs, 1), dtype=np.int8)
    net.measure_blocks("P", bases, rng)
    net.measure_blocks("V", bases, rng)
    bulk = time.time() - t0
    # generic engine lane: one 2-qubit sparse state per pair
    small = min(pairs, args.generic_cap)
    t0 = time.time()
    for i in range(small):
        tiny = prep_epr(1, 1)
        b = int(bases[i % pairs, 0])
        tiny.measure_blocks("P", np.array([[b]], dtype=np.int8), rng)
        tiny.measure_blocks("V", np.array([[b]], dtype=np.int8), rng)
    generic_net = time.time() - t0
    t0 = time.time()
    for i in range(small):
        st = prep_bb84(Bb84Descriptor("00", "10"))
        measure(st, [0, 1], ["X", "Z"], rng)
    engine = time.time() - t0
    print(f"pairs {pairs}")
    print(f"bulk_epr_lane_s {bulk:.4f}")
    print(f"per_pair_network_s {generic_net:.4f} (over {small} pairs)")
    print(f"sparse_engine_s {engine:.4f} (over {small} two-qubit states)")
    if bulk > 0:
        scaled = generic_net * (pairs / max(small, 1))
        print(f"bulk_speedup_vs_per_pair {scaled / bulk:.1f}x")
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="cenizk", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, with_protocol=True):
        if with_protocol:
            p.add_argument("--protocol", default="epr", choices=["epr", "crs-toy", "crs-dry"])
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--param", action="append", metavar="KEY=VALUE")
        p.add_argument("--out", default=None, help="output path")

    for stage in _STAGE_VERBS:
        p = sub.add_parser(stage, help=f"run the session through {stage}")
        add_common(p)
        p.add_argument("--in", dest="infile", default=None, help="resume from transcript")

    p = sub.add_parser("run-session", help="full honest session")
    add_common(p)

    p = sub.add_parser("run-experiment", help="named experiment")
    p.add_argument("--name", required=True, choices=harness.experiment_names())
    p.add_argument("--trials", type=int, default=100)
    add_common(p, with_protocol=False)

    p = sub.add_parser("run-attack", help="named attack experiment")
    p.add_argument("--name", required=True, choices=_ATTACKS)
    p.add_argument("--trials", type=int, default=100)
    add_common(p, with_protocol=False)

    p = sub.add_parser("bench", help="bulk EPR lane vs generic sparse engine")
    p.add_argument("--pairs", type=int, default=100_000)
    p.add_argument("--generic-cap", type=int, default=2_000)
    p.add_argument("--seed", type=int, default=0)

    args = parser.parse_args(argv)
    try:
        if args.command in _STAGE_VERBS:
            return _cmd_stage(args, args.command)
        if args.command == "run-session":
            return _cmd_run_session(args)
        if args.command == "run-experiment":
            return _cmd_run_experiment(args)
        if args.command == "run-attack":
            return _cmd_run_attack(args)
        if args.command == "bench":
            return _cmd_bench(args)
        raise ValueError(f"unknown command {args.command!r}")
    except (ValueError, OSError, harness.TranscriptError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
