"""Command line front end: run scenario files and report task verdicts.

Exit status: 0 when every task passes, 1 when any task fails, 2 on
scenario or usage errors.
"""
from __future__ import annotations

import argparse
import sys

from .scenario import ScenarioError, run_text


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pathgroupoid",
        description="path groupoid and connection-transform toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="execute a scenario file")
    run.add_argument("scenario", help="scenario file to execute")
    run.add_argument("--seed", type=int, default=None, help="override the scenario seed")
    run.add_argument(
        "--trials", type=int, default=None, help="override per-task trial counts"
    )
    run.add_argument(
        "--max-enum",
        type=int,
        default=None,
        help="override the exact-enumeration configuration cap",
    )
    run.add_argument(
        "--report", default=None, help="also write the report to this file"
    )
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        with open(args.scenario, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        report = run_text(
            text, seed=args.seed, trials=args.trials, max_enum=args.max_enum
        )
    except ScenarioError as exc:
        print(f"scenario error: {args.scenario}:{exc}", file=sys.stderr)
        return 2
    sys.stdout.write(report.output)
    if args.report:
        with open(args.report, "w", encoding="utf-8") as fh:
            fh.write(report.output)
    return 0 if report.passed else 1


if __name__ == "__main__":
    sys.exit(main())
