"""Command-line driver.

``gradedgeo check FILE`` parses a document and runs its tasks.  Exit status:
0 when every task passes, 1 when any task fails or errors, 2 for usage or
parse errors.  ``--json`` replaces the human report with a machine-readable
mirror (a JSON list of task records; timings are informational only).
"""

from __future__ import annotations

import argparse
import json
import sys
import time

from .formats import ParseError, parse_document
from .runner import TaskResult, run_document

USAGE_EXIT = 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gradedgeo",
        description="Exact checks for graded Poisson structures, bialgebras, and reduction.",
    )
    sub = parser.add_subparsers(dest="command")
    check = sub.add_parser("check", help="run all tasks in a document")
    check.add_argument("file", help="document to check")
    check.add_argument("--task", help="run only the task with this label or leading argument")
    check.add_argument("--json", action="store_true", help="emit the machine-readable mirror")
    check.add_argument(
        "--max-degree",
        type=int,
        metavar="K",
        help="abort any task whose intermediate monomials exceed total degree K",
    )
    check.add_argument(
        "--seed", type=int, help="seed for the randomized sub-checks offered by some tasks"
    )
    return parser


def format_human(results: list[TaskResult], elapsed_ms: float) -> str:
    lines = []
    for r in results:
        mark = {"pass": "PASS", "fail": "FAIL", "error": "ERROR"}[r.verdict]
        line = f"{mark:5s} {r.task}"
        if r.residual and r.verdict != "pass":
            line += f"  residual: {r.residual}"
        elif r.residual:
            line += f"  -> {r.residual}"
        if r.details:
            line += f"  [{r.details}]"
        lines.append(line)
    n_pass = sum(1 for r in results if r.verdict == "pass")
    lines.append(
        f"{n_pass}/{len(results)} tasks passed in {elapsed_ms:.1f} ms"
    )
    return "\n".join(lines) + "\n"


def format_json(results: list[TaskResult]) -> str:
    records = [
        {
            "task": r.task,
            "verdict": r.verdict,
            "residual": r.residual,
            "details": r.details,
            "elapsed_ms": r.elapsed_ms,
        }
        for r in results
    ]
    return json.dumps(records, indent=2, sort_keys=True) + "\n"


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return USAGE_EXIT if exc.code not in (0, None) else 0
    if args.command != "check":
        parser.print_help(sys.stderr)
        return USAGE_EXIT
    try:
        with open(args.file, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_EXIT
    try:
        doc = parse_document(text)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return USAGE_EXIT
    start = time.perf_counter()
    results = run_document(
        doc, only=args.task, seed=args.seed, max_degree=args.max_degree
    )
    elapsed_ms = (time.perf_counter() - start) * 1000
    if args.json:
        sys.stdout.write(format_json(results))
    else:
        sys.stdout.write(format_human(results, elapsed_ms))
    return 0 if all(r.verdict == "pass" for r in results) else 1


if __name__ == "__main__":  # pragma: no cover
    raise SystemExit(main())
