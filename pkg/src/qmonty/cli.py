"""Command-line front end.

Subcommands:

* ``sweep``    - payoff-vs-gamma curves (analytic, optionally simulated) as
                 CSV or JSON.
* ``verify``   - full-state simulation against every closed-form payoff over
                 a parameter grid; exits 1 if any deviation exceeds 1e-9.
* ``protocol`` - batched key-distribution rounds with transcripts and
                 summary statistics.
* ``info``     - derived quantities for a parameter choice.

Exit codes: 0 success, 1 verification failure, 2 usage or constraint error.
Flags win over values from an optional ``--config`` JSON file.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import oracles
from .game import GameConfig, entangled_initial, payoff_curve, separable_initial
from .oracles import default_gammas
from .protocols import ProtocolConfig, run_batch, write_transcripts
from .qudit import Strategy, qft, random_special_unitary, sum_d, uniform_superposition_strategy

VERIFY_TOL = 1e-9
CSV_HEADER = "gamma,payoff,scenario,d,m,k"
CSV_HEADER_SIM = "gamma,payoff,simulated,scenario,d,m,k"

SCENARIOS = (
    "classical-mixed",
    "qft-player",
    "separable-custom",
    "entangled-qft",
    "displacement",
)


class UsageError(ValueError):
    """Bad parameters for the requested command (exit code 2)."""


@dataclass(frozen=True)
class RunSpec:
    """Parsed request for one CLI invocation."""

    command: str
    scenario: str | None = None
    d: int = 3
    m: int = 1
    n: int = 2
    k: int = 0
    shift: int = 1
    doors: int = 1
    grid: int = 101
    seed: int = 0
    rounds: int = 1000
    pairs: int = 50
    min_d: int = 3
    max_d: int = 6
    protocol: str = "a"
    approve: str = "all"
    with_simulation: bool = False
    out: str | None = None
    format: str = "csv"


def _fmt(x: float) -> str:
    return f"{x:.12g}"


def _game_config(spec: RunSpec, gamma: float = 0.0) -> GameConfig:
    try:
        return GameConfig(spec.d, spec.m, 2, gamma)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _scenario_curves(spec: RunSpec) -> tuple[np.ndarray, np.ndarray, np.ndarray | None, str, str]:
    """Return (gammas, analytic, simulated-or-None, scenario tag, k column)."""
    gammas = default_gammas(spec.grid)
    cfg0 = _game_config(spec)
    d, m = spec.d, spec.m
    simulated = None
    k_col = ""
    if spec.scenario == "classical-mixed":
        tag = f"classical-mixed:i={spec.shift}"
        analytic = np.array(
            [oracles.payoff_separable(qft(d), sum_d(d, spec.shift), GameConfig(d, m, 2, g))
             for g in gammas]
        )
        if spec.with_simulation:
            simulated = payoff_curve(cfg0, qft(d), sum_d(d, spec.shift), gammas)
    elif spec.scenario == "qft-player":
        tag = "qft-player"
        analytic = np.array(
            [oracles.payoff_qft_separable(GameConfig(d, m, 2, g)) for g in gammas]
        )
        if spec.with_simulation:
            simulated = payoff_curve(cfg0, qft(d), qft(d), gammas)
    elif spec.scenario == "separable-custom":
        if not 1 <= spec.doors <= d:
            raise UsageError(f"--doors must lie in 1..{d}")
        tag = f"separable-custom:doors={spec.doors}"
        B = uniform_superposition_strategy(d, spec.doors)
        analytic = np.array(
            [oracles.payoff_separable(qft(d), B, GameConfig(d, m, 2, g)) for g in gammas]
        )
        if spec.with_simulation:
            simulated = payoff_curve(cfg0, qft(d), B, gammas)
    elif spec.scenario == "entangled-qft":
        tag = "entangled-qft"
        analytic = np.array(
            [oracles.payoff_entangled(qft(d), qft(d), GameConfig(d, m, 2, g))
             for g in gammas]
        )
        if spec.with_simulation:
            simulated = payoff_curve(
                cfg0, qft(d), qft(d), gammas, initial=entangled_initial(cfg0)
            )
    elif spec.scenario == "displacement":
        if not 0 <= spec.k < d:
            raise UsageError(f"--k must lie in 0..{d - 1}")
        tag = "displacement"
        k_col = str(spec.k)
        analytic = np.array(
            [oracles.payoff_displacement(spec.k, GameConfig(d, m, 2, g)) for g in gammas]
        )
        if spec.with_simulation:
            A = sum_d(d, spec.shift % d)
            B = sum_d(d, (spec.shift + spec.k) % d)
            simulated = payoff_curve(cfg0, A, B, gammas, initial=entangled_initial(cfg0))
    else:
        raise UsageError(f"unknown scenario {spec.scenario!r}; pick one of {SCENARIOS}")
    return gammas, analytic, simulated, tag, k_col


def cmd_sweep(spec: RunSpec) -> int:
    gammas, analytic, simulated, tag, k_col = _scenario_curves(spec)
    if spec.format == "csv":
        lines = [CSV_HEADER_SIM if simulated is not None else CSV_HEADER]
        for i, g in enumerate(gammas):
            cells = [_fmt(g), _fmt(analytic[i])]
            if simulated is not None:
                cells.append(_fmt(simulated[i]))
            cells += [tag, str(spec.d), str(spec.m), k_col]
            lines.append(",".join(cells))
        payload = "\n".join(lines) + "\n"
    else:
        points = []
        for i, g in enumerate(gammas):
            point = {"gamma": float(_fmt(g)), "payoff": float(_fmt(analytic[i]))}
            if simulated is not None:
                point["simulated"] = float(_fmt(simulated[i]))
            points.append(point)
        payload = json.dumps(
            {
                "scenario": tag,
                "d": spec.d,
                "m": spec.m,
                "k": int(k_col) if k_col else None,
                "points": points,
            },
            indent=2,
        ) + "\n"
    _write_output(spec.out, payload)
    return 0


def _write_output(path: str | None, payload: str) -> None:
    if path is None:
        sys.stdout.write(payload)
    else:
        with open(path, "w", newline="\n", encoding="utf-8") as fh:
            fh.write(payload)


def cmd_verify(spec: RunSpec) -> int:
    """Simulation vs closed form over the verification grid."""
    if not 2 <= spec.min_d <= spec.max_d <= 6:
        raise UsageError("verification grid needs 2 <= min-d <= max-d <= 6")
    rng = np.random.default_rng(spec.seed)
    gammas = (0.0, math.pi / 6, math.pi / 4, math.pi / 2)
    worst: dict[str, tuple[float, tuple]] = {
        "separable": (0.0, ()),
        "entangled": (0.0, ()),
        "displacement": (0.0, ()),
    }

    def note(name: str, dev: float, where: tuple) -> None:
        if dev > worst[name][0]:
            worst[name] = (dev, where)

    for d in range(spec.min_d, spec.max_d + 1):
        pairs = [
            (random_special_unitary(d, rng), random_special_unitary(d, rng))
            for _ in range(spec.pairs)
        ]
        for m in range(0, d - 1):
            for g in gammas:
                cfg = GameConfig(d, m, 2, g)
                sep0 = separable_initial(cfg)
                ent0 = entangled_initial(cfg)
                for p, (A, B) in enumerate(pairs):
                    sim = _payoff(cfg, A, B, sep0)
                    note("separable", abs(sim - oracles.payoff_separable(A, B, cfg)),
                         (d, m, g, p))
                    sim = _payoff(cfg, A, B, ent0)
                    note("entangled", abs(sim - oracles.payoff_entangled(A, B, cfg)),
                         (d, m, g, p))
                for k in range(d):
                    A = sum_d(d, 1 % d)
                    B = sum_d(d, (1 + k) % d)
                    sim = _payoff(cfg, A, B, ent0)
                    note("displacement",
                         abs(sim - oracles.payoff_displacement(k, cfg)), (d, m, g, k))

    failed = False
    for name, (dev, where) in worst.items():
        status = "ok" if dev <= VERIFY_TOL else f"FAIL at {where}"
        print(f"{name:>12}: max |simulation - closed form| = {dev:.3e}  {status}")
        failed |= dev > VERIFY_TOL
    return 1 if failed else 0


def _payoff(cfg: GameConfig, A: Strategy, B: Strategy, initial) -> float:
    from .game import expected_payoff, play_game

    return expected_payoff(play_game(cfg, A, B, initial))


def _parse_approvals(mask: str, m: int) -> tuple[bool, ...]:
    if mask == "all":
        return (True,) * m
    if mask == "none":
        return (False,) * m
    if len(mask) != m or any(c not in "01" for c in mask):
        raise UsageError(
            f"--approve must be 'all', 'none', or {m} characters of 0/1"
        )
    return tuple(c == "1" for c in mask)


def cmd_protocol(spec: RunSpec) -> int:
    if spec.protocol not in ("a", "b"):
        raise UsageError("--protocol must be 'a' or 'b'")
    m = spec.d - 2
    n = spec.d - 1 if spec.protocol == "b" else spec.n
    try:
        config = ProtocolConfig(
            d=spec.d,
            n=n,
            m=m,
            approvals=_parse_approvals(spec.approve, m),
            seed=spec.seed,
            rounds=spec.rounds,
        )
        config.validate_for(spec.protocol)  # type: ignore[arg-type]
        report = run_batch(config, spec.protocol)  # type: ignore[arg-type]
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    for line in report.summary_lines():
        print(line)
    print(_diagnostics_summary(report, config))
    if spec.out:
        write_transcripts(spec.out, report.transcripts)
        print(f"wrote {len(report.transcripts)} transcripts to {spec.out}")
    return 0


def _diagnostics_summary(report, config: ProtocolConfig) -> str:
    usable = [t for t in report.transcripts if not t.all_same]
    if report.protocol == "a":
        if not (config.all_approve and usable):
            return "entanglement diagnostic: skipped (declining validators or no usable rounds)"
        entangled = all(
            any(marg[1] > 1e-6 for marg in t.diagnostics["opened_marginals"])
            for t in usable
        )
        return f"residual opened-register entanglement: {'pass' if entangled else 'FAIL'}"
    if not (config.all_approve and usable):
        return "entanglement diagnostic: skipped (declining validators or no usable rounds)"
    uniform = all(
        abs(v - 1 / config.d) <= 1e-9
        for t in usable
        for marg in t.diagnostics["party_marginals"]
        for v in marg
    )
    pure = all(
        abs(t.diagnostics["residual_top_eigenvalue"] - 1) <= 1e-9 for t in usable
    )
    return (
        "residual party state pure with uniform marginals: "
        f"{'pass' if uniform and pure else 'FAIL'}"
    )


def cmd_info(spec: RunSpec) -> int:
    cfg = _game_config(spec)
    pns = oracles.classical_p_ns(spec.d)
    ps = oracles.classical_p_s(spec.d, spec.m)
    print(f"d={spec.d} doors, m={spec.m} opened, n={spec.n} parties")
    print(f"P_ns = {_fmt(pns)}   P_s = {_fmt(ps)}   P_ns + P_s = {_fmt(pns + ps)}")
    print(
        f"gamma_max = {_fmt(oracles.gamma_max(spec.d, spec.m))} rad, "
        f"uniform-player maximum payoff = {_fmt(oracles.payoff_max(spec.d, spec.m))}"
    )
    if spec.m == spec.d - 2:
        n_b = spec.d - 1
        print(f"protocol A: valid (d = m + 2); protocol B: valid with n = {n_b}")
    else:
        print("protocols need m = d - 2")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qmonty",
        description="Generalized quantum Monty Hall game: payoff sweeps, "
        "oracle verification, and key-distribution protocol batches.",
    )
    parser.add_argument(
        "--config", help="JSON file of default option values (flags win)"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sweep", help="emit a payoff-vs-gamma curve")
    p.add_argument("--scenario", required=True, choices=SCENARIOS)
    p.add_argument("--d", type=int, default=3, help="total doors")
    p.add_argument("--m", type=int, default=1, help="doors the host opens")
    p.add_argument("--k", type=int, default=0, help="displacement (displacement scenario)")
    p.add_argument("--i", dest="shift", type=int, default=1,
                   help="player shift for classical-mixed / base shift for displacement")
    p.add_argument("--doors", type=int, default=1,
                   help="superposition size for separable-custom")
    p.add_argument("--grid", type=int, default=101, help="gamma sample points")
    p.add_argument("--with-simulation", action="store_true",
                   help="add a full-state simulation column")
    p.add_argument("--out", help="output path (default: stdout)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")

    p = sub.add_parser("verify", help="simulation vs closed-form payoffs")
    p.add_argument("--pairs", type=int, default=50, help="random strategy pairs per d")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--min-d", dest="min_d", type=int, default=3)
    p.add_argument("--max-d", dest="max_d", type=int, default=6)

    p = sub.add_parser("protocol", help="run batched protocol rounds")
    p.add_argument("--protocol", required=True, choices=("a", "b"))
    p.add_argument("--d", type=int, required=True, help="doors (m = d - 2)")
    p.add_argument("--n", type=int, default=2,
                   help="parties for protocol A (protocol B fixes n = d - 1)")
    p.add_argument("--rounds", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--approve", default="all",
                   help="'all', 'none', or a 0/1 mask of length m")
    p.add_argument("--out", help="transcript output path (JSON lines)")

    p = sub.add_parser("info", help="derived quantities for (d, m, n)")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n", type=int, default=2)

    return parser


def _spec_from_args(args: argparse.Namespace) -> RunSpec:
    fields = RunSpec.__dataclass_fields__
    values = {k: v for k, v in vars(args).items() if k in fields and v is not None}
    return RunSpec(**values)


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)

    parser = build_parser()
    if known.config:
        try:
            with open(known.config, encoding="utf-8") as fh:
                defaults = json.load(fh)
            if not isinstance(defaults, dict):
                raise ValueError("config file must hold a JSON object")
        except (OSError, ValueError) as exc:
            print(f"error: cannot read config file: {exc}", file=sys.stderr)
            return 2
        for action in parser._subparsers._group_actions:  # noqa: SLF001
            for sp in action.choices.values():
                sp.set_defaults(**defaults)

    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse uses 2 for usage errors
        return int(exc.code or 0)

    handlers = {
        "sweep": cmd_sweep,
        "verify": cmd_verify,
        "protocol": cmd_protocol,
        "info": cmd_info,
    }
    try:
        return handlers[args.command](_spec_from_args(args))
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
