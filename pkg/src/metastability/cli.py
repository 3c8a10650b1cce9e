"""Command line entry point: ``metastability {bounds,verify,simulate,metastable}``.

Exit status: 0 success, 1 property or verdict failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from metastability import harness, rates
from metastability.gexpr import parse_rational


def _rational(text):
    try:
        return parse_rational(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _add_config_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--d", type=int, default=1, help="number of commuting operators")
    p.add_argument("--eps", type=_rational, default="1/2", help="tolerance NUM/DEN")
    p.add_argument("--g", default="const 1", help="counterexample function, e.g. 'affine 2 1'")
    p.add_argument("--modulus", default="auto", help="auto | hilbert | file:PATH")
    p.add_argument("--u-override", default=None, help="'const R' or 'monomial C K'")
    p.add_argument("--norm-bound", type=_rational, default=None, help="b with ||x|| <= b")
    p.add_argument("--space", default="l2:2", help="l2:DIM or lp:P:DIM")
    p.add_argument("--recipe", default="identity", help="operator family, NAME[:ARGS]")
    p.add_argument("--x", default="e0", help="e<i> | vec:a,b,.. | ones | random")
    p.add_argument("--n-cap", type=int, default=200)
    p.add_argument("--digit-budget", type=int, default=rates.DEFAULT_DIGIT_BUDGET)
    p.add_argument("--mode", choices=harness.MODES, default="exact")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None, help="report path (CSV path for simulate)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="metastability",
        description="Rates of metastability for multi-parameter ergodic averages.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_ in [
        ("bounds", "compute the rate of metastability theta"),
        ("simulate", "write the trajectory of ergodic averages as CSV"),
        ("metastable", "compare the least empirical witness with theta"),
    ]:
        _add_config_flags(sub.add_parser(name, help=help_))
    v = sub.add_parser("verify", help="run the seeded property suites")
    v.add_argument("--suite", choices=harness.SUITES, default="all")
    v.add_argument("--trials", type=int, default=100)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--out", default=None, help="report path")
    return parser


def _config(args) -> harness.ExperimentConfig:
    return harness.ExperimentConfig(
        space=args.space, recipe=args.recipe, x=args.x, eps=args.eps, g=args.g, d=args.d,
        n_cap=args.n_cap, digit_budget=args.digit_budget, mode=args.mode, seed=args.seed,
        out=args.out, modulus=args.modulus, u_override=args.u_override,
        norm_bound=args.norm_bound,
    )


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "verify":
            report = harness.cmd_verify(args.suite, args.trials, args.seed)
        else:
            report = harness.COMMANDS[args.command](_config(args))
    except rates.DigitBudgetError as exc:
        print(f"error: {exc} (log2 of partial value ~ {exc.log2_partial})", file=sys.stderr)
        return 2
    except (harness.ConfigError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    text = report.to_json()
    print(text)
    if args.out and args.command != "simulate":
        Path(args.out).write_text(text + "\n")
    return 0 if report.ok else 1


if __name__ == "__main__":
    sys.exit(main())
