#!/usr/bin/env python3
"""Batch statistics for both key-distribution protocols.

Runs the all-approve and one-decliner variants at the standard sizes and
prints agreement rates, all-same-strategy frequencies against 1/2^(n-1),
and the residual-entanglement diagnostics.  Transcripts go next to the
summary as JSON lines.
"""

import argparse
import pathlib

from qmonty.protocols import ProtocolConfig, run_batch, write_transcripts


def batch(protocol, d, n, approvals, seed, rounds, outdir):
    m = d - 2
    config = ProtocolConfig(
        d=d, n=n, m=m, approvals=approvals, seed=seed, rounds=rounds
    )
    report = run_batch(config, protocol)
    mask = "".join("1" if a else "0" for a in approvals)
    print(f"--- protocol {protocol.upper()}  d={d} n={n} approvals={mask} ---")
    for line in report.summary_lines():
        print("   ", line)
    path = outdir / f"protocol_{protocol}_d{d}_approve{mask}.jsonl"
    write_transcripts(path, report.transcripts)
    print(f"    transcripts: {path}")


def run(outdir: pathlib.Path, seed: int, rounds: int) -> None:
    outdir.mkdir(parents=True, exist_ok=True)
    batch("a", 4, 2, (True, True), seed, rounds, outdir)
    batch("a", 4, 2, (True, False), seed, rounds, outdir)
    batch("b", 3, 2, (True,), seed, rounds, outdir)
    batch("b", 5, 4, (True, True, True), seed, max(rounds // 10, 1), outdir)


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--outdir", default="out/protocols", type=pathlib.Path)
    parser.add_argument("--seed", default=2718, type=int)
    parser.add_argument("--rounds", default=2000, type=int)
    args = parser.parse_args()
    run(args.outdir, args.seed, args.rounds)
