#!/usr/bin/env python3
"""Emit every payoff-curve family as CSV (one file per curve).

Covers the classical-mixture recovery, the host-independent uniform-player
curve, the d=5 superposition family, the entangled double-Fourier curve,
and the d=6 displacement fan.  Each file carries both the closed-form and
the full-state simulated payoff so the agreement is visible in the data.
"""

import argparse
import pathlib
import sys

from qmonty.cli import main as cli


def run(outdir: pathlib.Path) -> None:
    outdir.mkdir(parents=True, exist_ok=True)
    jobs = [
        ("classical_mixed_d3_m1.csv",
         ["sweep", "--scenario", "classical-mixed", "--d", "3", "--m", "1"]),
        ("qft_player_d3_m1.csv",
         ["sweep", "--scenario", "qft-player", "--d", "3", "--m", "1"]),
    ]
    for doors in range(1, 5):
        jobs.append((
            f"superposition_family_d5_m1_doors{doors}.csv",
            ["sweep", "--scenario", "separable-custom", "--d", "5", "--m", "1",
             "--doors", str(doors)],
        ))
    jobs.append(("superposition_family_d5_m1_qft.csv",
                 ["sweep", "--scenario", "qft-player", "--d", "5", "--m", "1"]))
    jobs.append(("entangled_qft_d3_m1.csv",
                 ["sweep", "--scenario", "entangled-qft", "--d", "3", "--m", "1"]))
    for k in range(6):
        jobs.append((
            f"displacement_d6_m3_k{k}.csv",
            ["sweep", "--scenario", "displacement", "--d", "6", "--m", "3",
             "--k", str(k)],
        ))
    for name, args in jobs:
        target = outdir / name
        code = cli(args + ["--with-simulation", "--out", str(target)])
        if code != 0:
            raise SystemExit(f"sweep failed for {name} (exit {code})")
        print(f"wrote {target}")


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--outdir", default="out/curves", type=pathlib.Path)
    run(parser.parse_args().outdir)
    sys.exit(0)
