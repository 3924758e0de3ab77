"""Command-line entry point.

    arms-race-lab <subcommand> --scenario PATH --out-dir PATH [--format csv|svg|both] [--seed U64]

Exit status: 0 on success, 1 on validation or I/O error, 2 on computation error.
"""
from __future__ import annotations

import argparse
import os
import sys

from .errors import ComputationError, ValidationError
from .figures import reparse, validate_figures
from .output import emit_csv, emit_svg, read_csv
from .runner import run_subcommand
from .scenario import SUBCOMMANDS, U64_MAX, parse_scenario

EXIT_OK, EXIT_VALIDATION, EXIT_COMPUTATION = 0, 1, 2


def _u64(text: str) -> int:
    try:
        value = int(text, 10)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an unsigned 64-bit integer, got {text!r}") from None
    if not 0 <= value <= U64_MAX:
        raise argparse.ArgumentTypeError(f"seed must lie in [0, {U64_MAX}], got {value}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="arms-race-lab", description="AI attacker-defender contest experiments")
    parser.add_argument("subcommand", choices=SUBCOMMANDS)
    parser.add_argument("--scenario", required=True, help="scenario file (flat dotted key = value)")
    parser.add_argument("--out-dir", required=True, help="directory for emitted tables")
    parser.add_argument("--format", choices=("csv", "svg", "both"), default="csv")
    parser.add_argument("--seed", type=_u64, default=None, help="overrides the scenario seed")
    return parser


def execute(subcommand, scenario_path, out_dir, fmt="csv", seed=None) -> list[str]:
    """Run one subcommand end to end and return the written paths."""
    try:
        with open(scenario_path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ValidationError(f"cannot read scenario {scenario_path}: {exc.strerror}") from exc
    sc = parse_scenario(text, subcommand)
    if seed is not None:
        from dataclasses import replace
        sc = replace(sc, seed=seed)
    tables = run_subcommand(subcommand, sc)
    if subcommand == "figures":
        checks = validate_figures(reparse(tables))
        checks.metadata = dict(tables[0].metadata)
        tables.append(checks)
    os.makedirs(out_dir, exist_ok=True)
    written = []
    for t in tables:
        if fmt in ("csv", "both") or t.name == "figure_checks":
            path = os.path.join(out_dir, f"{t.name}.csv")
            emit_csv(t, path)
            written.append(path)
        if fmt in ("svg", "both") and t.plot is not None:
            path = os.path.join(out_dir, f"{t.name}.svg")
            emit_svg(t, t.plot.kind, path)
            written.append(path)
    if subcommand == "figures" and fmt in ("csv", "both"):
        # validate what actually landed on disk
        on_disk = {t.name: read_csv(os.path.join(out_dir, f"{t.name}.csv")) for t in tables}
        rechecked = validate_figures(on_disk)
        if rechecked.rows != tables[-1].rows:
            raise ComputationError("figure checks differ between emitted CSV and in-memory tables")
    return written


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        # argparse reports usage errors with status 2, which is reserved here
        return EXIT_VALIDATION if exc.code == 2 else exc.code
    try:
        execute(args.subcommand, args.scenario, args.out_dir, args.format, args.seed)
    except ValidationError as exc:
        print(f"arms-race-lab: validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except ComputationError as exc:
        print(f"arms-race-lab: computation error: {exc}", file=sys.stderr)
        return EXIT_COMPUTATION
    except OSError as exc:
        print(f"arms-race-lab: I/O error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    if args.subcommand == "figures":
        failed = _failed_checks(args.out_dir)
        for name in failed:
            print(f"arms-race-lab: caption check failed: {name}", file=sys.stderr)
    return EXIT_OK


def _failed_checks(out_dir) -> list[str]:
    checks = read_csv(os.path.join(out_dir, "figure_checks.csv"))
    return [row[0] for row in checks.rows if row[1] is not True]


if __name__ == "__main__":
    sys.exit(main())
