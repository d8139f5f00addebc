"""Command-line front end.

Exit codes: 0 all checks passed (or the solver ran cleanly), 1 an identity
check failed, 2 the configuration was rejected.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import sys
from pathlib import Path

from .config import ConfigError, JobConfig
from .errors import DomainError, GaudinError, PoleError
from .report import decode, encode
from . import suite

COMMANDS = {
    "verify": suite.run_verify,
    "bethe": suite.run_bethe,
    "spectrum": suite.run_spectrum,
    "nogo": suite.run_nogo,
    "sweep": suite.run_sweep,
}
CSV_TABLES = {"sweep": "sweep", "nogo": "nogo", "spectrum": "joint", "bethe": "solutions"}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qgaudin", description="Gaudin magnet and q-Gaudin algebra workbench")
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "verify": "run the identity suite for one family and system",
        "bethe": "solve the Bethe equations and compare with exact diagonalization",
        "spectrum": "exact joint spectrum of the magnets",
        "nogo": "least-squares search for a standard r-matrix versus q",
        "sweep": "continuation in the family parameter",
    }
    for name, text in helps.items():
        p = sub.add_parser(name, help=text)
        p.add_argument("--config", required=True, help="JSON job configuration")
        p.add_argument("--out", help="write the JSON report here (default: stdout)")
        p.add_argument("--seed", type=int, help="override the config seed")
        p.add_argument("--tol-scale", type=float, default=1.0, help="multiply every tolerance")
        p.add_argument("--csv", help="also write the main table as CSV")
        p.add_argument("--no-timings", action="store_true", help="omit timing fields from the report")
    return parser


def _flatten(value):
    # CSV cells: complex numbers as Python literals, lists joined with ';'
    value = decode(encode(value))
    if isinstance(value, list):
        return ";".join(str(_flatten(v)) for v in value)
    if isinstance(value, dict):
        return json.dumps(encode(value), sort_keys=True)
    return value


def write_csv(rows: list[dict], path) -> None:
    fields: list[str] = []
    for row in rows:
        fields.extend(k for k in row if k not in fields)
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=fields)
        writer.writeheader()
        for row in rows:
            writer.writerow({k: _flatten(v) for k, v in row.items()})


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = JobConfig.load(args.config)
        if args.seed is not None:
            if args.seed < 0:
                raise ConfigError("--seed must be non-negative")
            config = dataclasses.replace(config, seed=args.seed)
        if args.tol_scale <= 0:
            raise ConfigError("--tol-scale must be positive")
        report = COMMANDS[args.command](config, tol_scale=args.tol_scale)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (PoleError, DomainError) as exc:
        # invariant violations that only show up once operators are built
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except GaudinError as exc:
        print(f"failed: {exc}", file=sys.stderr)
        return 1

    text = report.to_json(include_timings=not args.no_timings)
    if args.out:
        Path(args.out).write_text(text + "\n")
    else:
        print(text)
    if args.csv:
        write_csv(report.tables.get(CSV_TABLES[args.command], []), args.csv)
    for line in report.summary_lines():
        if line.startswith("FAIL"):
            print(line, file=sys.stderr)
    return 0 if report.passed else 1


if __name__ == "__main__":
    sys.exit(main())
