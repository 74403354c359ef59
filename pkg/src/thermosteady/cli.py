"""Command-line entry point: ``thermosteady run <scenario>`` and ``thermosteady list``."""

from __future__ import annotations

import argparse
import csv
import sys
import time
from pathlib import Path
from typing import List, Optional

import numpy as np

from . import __version__
from .config import ScenarioParseError, load_scenario
from .errors import IntegrationError, ThermoSteadyError
from .runner import Overrides, ResultTable, RunResult, find_shipped, run_scenario, shipped_scenarios

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_VALIDATION = 3
EXIT_RUNTIME = 4


def format_value(value) -> str:
    """Deterministic text form of one table cell."""
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".12g")
    return str(value)


def write_table(table: ResultTable, path: Path, result: RunResult, seed) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(f"# scenario: {result.scenario.name}\n")
        fh.write(f"# kind: {result.scenario.kind}\n")
        fh.write(f"# table: {table.name}\n")
        fh.write(f"# seed: {seed}\n")
        fh.write(f"# version: {__version__}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(table.columns)
        for row in table.rows:
            w.writerow([format_value(v) for v in row])


def _parse_tolerances(items: List[str]) -> dict:
    out = {}
    for item in items:
        key, sep, val = item.partition("=")
        if not sep:
            raise ValueError(f"--tolerance expects NAME=VALUE, got {item!r}")
        out[key.strip()] = float(val)
    return out


def _resolve(target: str):
    path = Path(target)
    if path.exists() or target.endswith(".toml"):
        return load_scenario(path)
    sc = find_shipped(target)
    if sc is None:
        raise ScenarioParseError(f"{target}: no such file or shipped scenario (see 'thermosteady list')")
    return sc


def cmd_run(args) -> int:
    try:
        sc = _resolve(args.scenario)
    except ScenarioParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except ThermoSteadyError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION

    start = time.perf_counter()
    try:
        ov = Overrides(args.seed, _parse_tolerances(args.tolerance))
        result = run_scenario(sc, ov)
    except (IntegrationError, ArithmeticError) as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except ValueError as exc:
        # ValidationError, DomainError, insufficient evidence, bad overrides
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except ThermoSteadyError as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    elapsed = time.perf_counter() - start

    seed = sc.seed if args.seed is None else args.seed
    out = Path(args.out or sc.output or Path("out") / sc.name)
    out.mkdir(parents=True, exist_ok=True)
    for table in result.tables:
        write_table(table, out / f"{table.name}.csv", result, seed)
    header = [f"scenario: {sc.name} ({sc.kind}), seed {seed}, version {__version__}"]
    if sc.topic:
        header.append(f"topic: {sc.topic}")
    text = "\n".join(header + result.summary) + "\n"
    (out / "summary.txt").write_text(text, encoding="utf-8")
    sys.stdout.write(text)
    print(f"wrote {len(result.tables)} table(s) to {out} in {elapsed:.2f} s")
    return EXIT_OK


def cmd_list(args) -> int:
    for sc in shipped_scenarios():
        print(f"{sc.name:28s} {sc.kind:16s} {sc.topic}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="thermosteady",
        description="Run temperature-as-steady-state scenarios and write tabular results.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a scenario file or a shipped scenario by name")
    run.add_argument("scenario", help="path to a .toml scenario or the name of a shipped one")
    run.add_argument("--seed", type=int, default=None, help="override the scenario seed")
    run.add_argument("--out", default=None, help="output directory (default: out/<name>)")
    run.add_argument(
        "--tolerance", action="append", default=[], metavar="NAME=VALUE",
        help="override a check tolerance: " + ", ".join(Overrides.KNOWN),
    )
    run.set_defaults(func=cmd_run)

    lst = sub.add_parser("list", help="list shipped scenarios")
    lst.set_defaults(func=cmd_list)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
