"""Command line entry point: ``tickcheck verify|simulate|emit``."""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction

from . import __version__
from .errors import TickcheckError
from .model_ir import load_model
from .scenario import sample_scenario
from .sim_oracle import derive_ticks, simulate
from .smt_encoder import emit_smtlib, encode_model
from .solver import default_command
from .tcs import check_against_model, load_tcs
from .verifier import VerificationTask, constraint_script, render_report, verify

EXIT_USAGE = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _fraction(text: str) -> Fraction:
    try:
        v = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not 0 <= v <= 1:
        raise argparse.ArgumentTypeError("threshold must lie in [0, 1]")
    return v


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="tickcheck", description="Bounded SMT verification of timing constraints on block-diagram models.")
    p.add_argument("--version", action="version", version=f"tickcheck {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    v = sub.add_parser("verify", help="check every constraint of a .tcs spec")
    v.add_argument("model")
    v.add_argument("spec")
    v.add_argument("--bound", "-N", type=_positive, default=300)
    v.add_argument("--runs", "-M", type=_positive, default=100)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--threshold", type=_fraction, default=None)
    v.add_argument("--solver", default=None, help="solver command line (default: $TICKCHECK_SOLVER or 'z3 -in -smt2')")
    v.add_argument("--mode", choices=("det", "prob"), default="prob")
    v.add_argument("--jobs", type=_positive, default=1)
    v.add_argument("--out", default=None, help="also write the JSON report here")
    v.add_argument("--format", choices=("table", "json"), default="table")

    s = sub.add_parser("simulate", help="dump a concrete trace as CSV")
    s.add_argument("model")
    s.add_argument("--spec", default=None, help="add clock tick columns from this spec")
    s.add_argument("--bound", "-N", type=_positive, default=20)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--run", type=int, default=0, help="scenario index for RandomSource pins")

    e = sub.add_parser("emit", help="print the SMT-LIB query for one constraint")
    e.add_argument("model")
    e.add_argument("spec", nargs="?")
    e.add_argument("--constraint", default=None)
    e.add_argument("--bound", "-N", type=_positive, default=20)
    e.add_argument("--seed", type=int, default=None, help="pin RandomSources from this seed (run 0)")
    return p


def _cmd_verify(args) -> int:
    task = VerificationTask(args.model, args.spec, bound=args.bound, runs=args.runs, seed=args.seed,
                            threshold=args.threshold, solver=args.solver or default_command(),
                            mode=args.mode, jobs=args.jobs)
    report = verify(task)
    sys.stdout.write(render_report(report, args.format))
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(render_report(report, "json"))
    return report.exit_code


def _cmd_simulate(args) -> int:
    model = load_model(args.model)
    pins = sample_scenario(model, args.bound, args.seed, args.run).pins
    trace = simulate(model, args.bound, pins)
    if args.spec:
        spec = load_tcs(args.spec)
        check_against_model(spec, model)
        derive_ticks(trace, list(spec.clocks.values()), model)
    sys.stdout.write(trace.to_csv())
    return 0


def _cmd_emit(args) -> int:
    model = load_model(args.model)
    pins = None if args.seed is None else sample_scenario(model, args.bound, args.seed, 0).pins
    base = encode_model(model, args.bound, pins)
    if not args.spec:
        sys.stdout.write(emit_smtlib(base, "true", "assert"))
        return 0
    spec = load_tcs(args.spec)
    check_against_model(spec, model)
    chosen = [tc for tc in spec.constraints if args.constraint in (None, tc.name)]
    if not chosen:
        raise TickcheckError(f"no constraint named {args.constraint!r}")
    for tc in chosen:
        sys.stdout.write(f"; constraint {tc.name} ({tc.kind})\n")
        sys.stdout.write(constraint_script(base, spec, tc)[1])
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handler = {"verify": _cmd_verify, "simulate": _cmd_simulate, "emit": _cmd_emit}[args.command]
    try:
        return handler(args)
    except (TickcheckError, OSError) as exc:
        print(f"tickcheck: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
