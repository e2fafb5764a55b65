"""``h2ma`` command line: bench, gradcmp, run and hv."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import harness
from .optimizer import GRADIENT_MODES, H2maConfig, run
from .zdt import PROBLEM_NAMES, make_problem


def _common(p: argparse.ArgumentParser, *, runs: bool = False) -> None:
    p.add_argument("--problem", required=True, choices=PROBLEM_NAMES)
    p.add_argument("--n", type=int, default=30, help="decision variables (default 30)")
    p.add_argument("--budget", type=int, default=20000, help="evaluations per run (default 20000)")
    p.add_argument("--seed", type=int, default=0, help="base seed (default 0)")
    if runs:
        p.add_argument("--runs", type=int, default=100)
        p.add_argument("--trace-interval", type=int, default=2000)
        p.add_argument("--gradient-mode", choices=GRADIENT_MODES, default="numeric")
        p.add_argument("--workers", type=int, default=1)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="h2ma", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bench", help="repeated runs and percentile tables")
    _common(p, runs=True)
    p.add_argument("--output", required=True, help="directory for the CSV files")

    p = sub.add_parser("gradcmp", help="numeric vs analytic gradient evaluation counts")
    _common(p)
    p.add_argument("--output", help="CSV file (default: stdout)")

    p = sub.add_parser("run", help="single run, archive dumped as CSV")
    _common(p)
    p.add_argument("--gradient-mode", choices=GRADIENT_MODES, default="numeric")
    p.add_argument("--output", help="CSV file (default: stdout)")

    p = sub.add_parser("hv", help="hypervolume of the points in a CSV file")
    p.add_argument("file")
    p.add_argument("--nadir", type=float, nargs="+", required=True)
    return parser


def _emit(text: str, output) -> None:
    if output is None:
        sys.stdout.write(text)
    else:
        harness._write_all({Path(output): text})


def _bench(args) -> None:
    config = harness.ExperimentConfig(
        problem=args.problem, n=args.n, budget=args.budget, runs=args.runs,
        trace_interval=args.trace_interval, gradient_mode=args.gradient_mode,
        seed=args.seed, output=args.output, workers=args.workers)
    harness.run_experiment(config)
    print(f"wrote percentile tables to {args.output}")


def _gradcmp(args) -> None:
    rows = harness.compare_gradient_modes(args.problem, args.budget, args.seed, n=args.n)
    _emit(harness._csv_text(harness.GRADCMP_HEADER, rows), args.output)


def _run(args) -> None:
    problem = make_problem(args.problem, args.n)
    result = run(problem, H2maConfig(budget=args.budget, gradient_mode=args.gradient_mode,
                                     rng_seed=args.seed))
    _emit(harness.archive_csv(result.archive), args.output)


def _hv(args) -> None:
    print(harness._fmt(harness.hv_of_file(args.file, args.nadir)))


COMMANDS = {"bench": _bench, "gradcmp": _gradcmp, "run": _run, "hv": _hv}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        COMMANDS[args.command](args)
    except (ValueError, OSError) as exc:
        print(f"h2ma {args.command}: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
