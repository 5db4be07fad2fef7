"""Command-line front end: run Monte Carlo trials or the exact oracle.

Machine formats (json, csv) have a fixed field set and order so reruns
with the same arguments and seed are byte-identical; json mode emits one
object per trial, one per line.
"""
from __future__ import annotations

import argparse
import json
import secrets
import sys
from fractions import Fraction
from enum import Enum

from .adversary import AdversaryKind
from .analysis import (
    BranchDistribution,
    ProtocolConfig,
    RunReport,
    aggregate,
    enumerate_distribution,
    run,
)
from .protocol import ProtocolVariant, Verdict

REPORT_FIELDS = (
    "n",
    "variant",
    "adversary",
    "sifted_length",
    "check_error_rate",
    "verdict",
    "final_key_length",
    "keys_agree",
    "eve_known_final_bits",
    "leakage_fraction",
    "seed",
)

ORACLE_METRICS = (
    "keep_probability",
    "error_rate",
    "knows_bit_probability",
    "leakage_fraction",
)

MAX_SEED = 2**64


class OutputFormat(Enum):
    JSON = "json"
    CSV = "csv"
    TABLE = "table"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sqkdsim",
        description=(
            "Simulate a single-state semi-quantum key distribution protocol "
            "under optional eavesdropping, or print the exact per-round "
            "branch probabilities."
        ),
    )
    parser.add_argument("--rounds", type=int, default=100_000, metavar="INT",
                        help="qubits sent per trial (default: %(default)s)")
    parser.add_argument("--trials", type=int, default=1, metavar="INT",
                        help="independent runs; trial i uses seed+i (default: 1)")
    parser.add_argument("--seed", type=int, default=None, metavar="UINT64",
                        help="base seed; generated and echoed to stderr if omitted")
    parser.add_argument("--protocol", choices=[v.value for v in ProtocolVariant],
                        default=ProtocolVariant.ORIGINAL.value,
                        help="sifting variant (default: %(default)s)")
    parser.add_argument("--adversary", choices=[a.value for a in AdversaryKind],
                        default=AdversaryKind.NONE.value,
                        help="eavesdropping strategy (default: %(default)s)")
    parser.add_argument("--threshold", type=float, default=0.0, metavar="FLOAT",
                        help="abort when the check error rate exceeds this (default: 0)")
    parser.add_argument("--output", choices=[f.value for f in OutputFormat],
                        default=OutputFormat.TABLE.value,
                        help="report format (default: %(default)s)")
    parser.add_argument("--exact", action="store_true",
                        help="print the exact enumeration oracle instead of simulating")
    return parser


def parse_args(argv: list[str] | None = None) -> argparse.Namespace:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.rounds < 1:
        parser.error(f"--rounds must be >= 1, got {args.rounds}")
    if args.trials < 1:
        parser.error(f"--trials must be >= 1, got {args.trials}")
    if not 0.0 <= args.threshold <= 1.0:
        parser.error(f"--threshold must lie in [0, 1], got {args.threshold}")
    if args.seed is not None and not 0 <= args.seed < MAX_SEED:
        parser.error(f"--seed must be an unsigned 64-bit integer, got {args.seed}")
    return args


def report_row(config: ProtocolConfig, report: RunReport) -> dict:
    """One trial as an ordered mapping with exactly the REPORT_FIELDS keys."""
    return {
        "n": report.n,
        "variant": config.variant.value,
        "adversary": config.adversary.value,
        "sifted_length": report.sifted_length,
        "check_error_rate": report.check_error_rate,
        "verdict": report.verdict.value,
        "final_key_length": report.final_key_length,
        "keys_agree": report.keys_agree,
        "eve_known_final_bits": report.eve_known_final_bits,
        "leakage_fraction": report.leakage_fraction,
        "seed": config.seed,
    }


def report_from_row(row: dict) -> RunReport:
    """Rebuild the RunReport a json row was emitted from."""
    return RunReport(
        n=row["n"],
        sifted_length=row["sifted_length"],
        check_error_rate=row["check_error_rate"],
        verdict=Verdict(row["verdict"]),
        final_key_length=row["final_key_length"],
        keys_agree=row["keys_agree"],
        eve_known_final_bits=row["eve_known_final_bits"],
        leakage_fraction=row["leakage_fraction"],
    )


def _csv_cell(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def emit_reports(rows: list[dict], fmt: OutputFormat, reports: list[RunReport]) -> str:
    if fmt is OutputFormat.JSON:
        return "\n".join(json.dumps(row) for row in rows)
    if fmt is OutputFormat.CSV:
        lines = [",".join(REPORT_FIELDS)]
        lines += [",".join(_csv_cell(row[f]) for f in REPORT_FIELDS) for row in rows]
        return "\n".join(lines)
    return _reports_table(rows, reports)


def _reports_table(rows: list[dict], reports: list[RunReport]) -> str:
    headers = list(REPORT_FIELDS)
    cells = [
        [
            str(row[f]) if not isinstance(row[f], float) else format(row[f], ".6g")
            for f in headers
        ]
        for row in rows
    ]
    widths = [
        max(len(h), *(len(r[i]) for r in cells)) if cells else len(h)
        for i, h in enumerate(headers)
    ]
    lines = ["  ".join(h.ljust(w) for h, w in zip(headers, widths))]
    lines += ["  ".join(c.ljust(w) for c, w in zip(row, widths)) for row in cells]
    if len(reports) > 1:
        summary = aggregate(reports)
        lines.append("")
        lines.append(f"trials {summary.trials}  aborts {summary.abort_count}")
        for name, stats in summary.metrics.items():
            line = (
                f"{name}: mean {stats.mean:.6g}  min {stats.min:.6g}  "
                f"max {stats.max:.6g}"
            )
            if stats.stderr is not None:
                line += f"  stderr {stats.stderr:.3g}"
            lines.append(line)
    return "\n".join(lines)


def _fraction_pair(value: Fraction) -> dict:
    return {"fraction": str(value), "decimal": float(value)}


def _branch_rows(dist: BranchDistribution) -> list[dict]:
    def sort_key(item):
        (bob_bit, bob_outcome, basis, outcome, knows), _ = item
        return (bob_bit, -1 if bob_outcome is None else bob_outcome,
                basis.value, outcome.value, knows)

    rows = []
    for (bob_bit, bob_outcome, basis, outcome, knows), p in sorted(
        dist.branches.items(), key=sort_key
    ):
        rows.append(
            {
                "bob_bit": bob_bit,
                "bob_outcome": bob_outcome,
                "alice_basis": basis.value,
                "alice_outcome": outcome.value,
                "eve_knows": knows,
                "fraction": str(p),
                "decimal": float(p),
            }
        )
    return rows


def emit_distribution(dist: BranchDistribution, fmt: OutputFormat) -> str:
    metrics = {name: getattr(dist, name) for name in ORACLE_METRICS}
    if fmt is OutputFormat.JSON:
        obj = {
            "variant": dist.variant.value,
            "adversary": dist.adversary.value,
            **{name: _fraction_pair(value) for name, value in metrics.items()},
            "branches": _branch_rows(dist),
        }
        return json.dumps(obj)
    if fmt is OutputFormat.CSV:
        lines = ["variant,adversary,metric,fraction,decimal"]
        lines += [
            f"{dist.variant.value},{dist.adversary.value},{name},"
            f"{value},{_csv_cell(float(value))}"
            for name, value in metrics.items()
        ]
        return "\n".join(lines)
    lines = [f"exact per-round branch probabilities "
             f"({dist.variant.value} protocol, adversary {dist.adversary.value})"]
    lines.append("")
    for name, value in metrics.items():
        lines.append(f"{name}: {value} = {float(value):.6g}")
    lines.append("")
    lines.append("bob_bit  bob_outcome  alice_basis  alice_outcome  eve_knows  probability")
    for row in _branch_rows(dist):
        outcome = "-" if row["bob_outcome"] is None else str(row["bob_outcome"])
        lines.append(
            f"{row['bob_bit']:<7}  {outcome:<11}  {row['alice_basis']:<11}  "
            f"{row['alice_outcome']:<13}  {str(row['eve_knows']).lower():<9}  "
            f"{row['fraction']}"
        )
    return "\n".join(lines)


def main(argv: list[str] | None = None) -> int:
    args = parse_args(argv)
    variant = ProtocolVariant(args.protocol)
    adversary = AdversaryKind(args.adversary)
    fmt = OutputFormat(args.output)
    try:
        if args.exact:
            print(emit_distribution(enumerate_distribution(variant, adversary), fmt))
            return 0
        seed = args.seed
        if seed is None:
            seed = secrets.randbits(63)
            print(f"seed {seed}", file=sys.stderr)
        rows = []
        reports = []
        for trial in range(args.trials):
            config = ProtocolConfig(
                n=args.rounds,
                variant=variant,
                adversary=adversary,
                threshold=args.threshold,
                seed=(seed + trial) % MAX_SEED,
            )
            report = run(config)
            rows.append(report_row(config, report))
            reports.append(report)
        print(emit_reports(rows, fmt, reports))
        return 0
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def console_main() -> None:
    raise SystemExit(main())
