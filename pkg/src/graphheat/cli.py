"""Command-line entry point: run a scenario file and write its reports."""

from __future__ import annotations

import argparse
import os
import sys

from .errors import GraphHeatError, ParseError, ValidationError
from .scenarios import run_scenario


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="graphheat",
        description="Heat-semigroup controllability experiments on weighted graphs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run a scenario JSON file")
    run.add_argument("scenario", help="path to the scenario file")
    run.add_argument(
        "--out",
        default=None,
        help="output directory (default: $GHC_OUT_DIR or ./reports)",
    )
    run.add_argument("--seed", type=int, default=None, help="override the scenario seed")
    run.add_argument("--verbose", action="store_true", help="print per-assertion lines")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    out_dir = args.out or os.environ.get("GHC_OUT_DIR") or "reports"
    try:
        outcome = run_scenario(
            args.scenario, out_dir, seed_override=args.seed, verbose=args.verbose
        )
    except (ParseError, ValidationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except GraphHeatError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    for path in outcome.files:
        print(path)
    if not outcome.report.passed:
        failed = [a.name for a in outcome.report.assertions if not a.passed]
        print(f"FAILED assertions: {', '.join(failed)}", file=sys.stderr)
    return outcome.exit_code


if __name__ == "__main__":
    raise SystemExit(main())
