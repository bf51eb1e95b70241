"""
Command-line front end for the tropicore analysis engine.

This module implements:
- analyze: spectrum, classes, critical graph, eigencones and core of a matrix
  in max algebra, nonnegative algebra or both, as JSON or Graphviz DOT
- verify: the oracle harness over seeded random instances, dumping witness
  files for every failed check

Usage:
    python -m tropicore.main analyze example2 --algebra both
    python -m tropicore.main verify --seed 1 --trials 50 --size 5
"""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import List, Optional, Sequence

import numpy as np

from .utils.algebra import Matrix, Semiring
from .utils.errors import PreconditionError, TropicoreError
from .utils.exporters import export_dot
from .utils.instances import random_grid_matrix, random_matrix, random_structured_matrix
from .utils.oracle import OracleReport, verify_bundle
from .utils.report import PairedReport, build_report, read_matrix
from .utils.settings import MatrixLibrary, Settings, load_settings

logger = logging.getLogger("tropicore")

ALGEBRAS = {"max": (Semiring.MAX_TIMES,), "nonneg": (Semiring.PLUS_TIMES,),
            "both": (Semiring.MAX_TIMES, Semiring.PLUS_TIMES)}
ORACLE_SIZE_LIMIT = 8
VERIFICATION_FAILED = 1


def random_reducible_matrix(rng: np.random.Generator, n: int) -> Matrix:
    return random_structured_matrix(rng, n=n)[0]


# verify trials rotate through these
GENERATORS = (random_matrix, random_grid_matrix, random_reducible_matrix)


def positive_float(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if not value > 0:
        raise argparse.ArgumentTypeError(f"must be positive: {text!r}")
    return value


def positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be at least 1: {text!r}")
    return value


def parse_args(argv: Optional[Sequence[str]] = None) -> argparse.Namespace:
    parser = argparse.ArgumentParser(
        prog="tropicore",
        description="Spectral theory and cores of nonnegative matrices in max and nonnegative algebra.",
    )
    parser.add_argument("--verbose", action="store_true", help="log numerical detail to stderr")
    commands = parser.add_subparsers(dest="command", required=True)

    analyze = commands.add_parser("analyze", help="analyse one matrix")
    analyze.add_argument("input", help="JSON/CSV matrix file, or the name of a shipped matrix")
    analyze.add_argument("--algebra", choices=sorted(ALGEBRAS), default="max")
    analyze.add_argument("--power", type=positive_int, default=1,
                         help="report eigencones of A^k (default: 1)")
    analyze.add_argument("--rho", type=positive_float, default=None,
                         help="restrict eigencones to this eigenvalue")
    analyze.add_argument("--out", choices=("json", "dot"), default="json")
    analyze.add_argument("--tol", type=positive_float, default=None, help="relative tolerance")
    analyze.add_argument("--horizon", type=positive_int, default=None,
                         help="number of powers probed by the periodicity classification")

    verify = commands.add_parser("verify", help="run the oracle harness on random matrices")
    verify.add_argument("--seed", type=int, default=None)
    verify.add_argument("--trials", type=positive_int, default=10)
    verify.add_argument("--size", type=positive_int, default=4)
    verify.add_argument("--algebra", choices=sorted(ALGEBRAS), default="both")
    verify.add_argument("--tol", type=positive_float, default=None, help="relative tolerance")
    verify.add_argument("--witness-dir", type=Path, default=Path("witnesses"),
                        help="directory receiving one JSON file per failed instance")
    args = parser.parse_args(argv)
    if args.command == "analyze" and args.rho is not None and args.algebra == "both":
        parser.error("--rho selects one eigenvalue; pick --algebra max or nonneg")
    return args


def load_input(source: str, library: MatrixLibrary) -> Matrix:
    path = Path(source)
    if path.is_file():
        return read_matrix(path)
    return library.get_matrix(path.stem if path.suffix == ".json" else source)


def cmd_analyze(args: argparse.Namespace, settings: Settings) -> int:
    a = load_input(args.input, MatrixLibrary())
    tol = settings.tolerance.build()
    if args.out == "dot":
        sys.stdout.write(export_dot(a, tol))
        return 0

    reports = [
        build_report(a, sr, tol, power=args.power, rho=args.rho, horizon=args.horizon,
                     gate=settings.golden_gate, direct_limit=settings.direct_solve_limit)
        for sr in ALGEBRAS[args.algebra]
    ]
    if args.algebra == "both":
        output = PairedReport(max=reports[0], nonneg=reports[1]).model_dump_json(indent=2)
    else:
        output = reports[0].model_dump_json(indent=2)
    sys.stdout.write(output + "\n")
    return 0


def write_witness(directory: Path, name: str, report: OracleReport) -> Path:
    directory.mkdir(parents=True, exist_ok=True)
    path = directory / f"{name}.json"
    payload = {
        "algebra": report.algebra,
        "seed": report.seed,
        "failures": [check.model_dump() for check in report.failures()],
    }
    path.write_text(json.dumps(payload, indent=2), encoding="utf-8")
    return path


def cmd_verify(args: argparse.Namespace, settings: Settings) -> int:
    if args.size > ORACLE_SIZE_LIMIT:
        raise PreconditionError(f"oracle-backed trials need n <= {ORACLE_SIZE_LIMIT}, got {args.size}")
    seed = settings.seed if args.seed is None else args.seed
    tol = settings.tolerance.build()
    check_tol = settings.oracle_tolerance.build()

    failed: List[str] = []
    checked = 0
    for trial in range(args.trials):
        rng = np.random.default_rng([seed, trial])
        a = GENERATORS[trial % len(GENERATORS)](rng, args.size)
        for sr in ALGEBRAS[args.algebra]:
            name = f"seed{seed}_trial{trial}_{sr.value}"
            report = verify_bundle(a, sr, tol=tol, check_tol=check_tol, probes=settings.probes,
                                   seed=seed, instance=name)
            checked += len(report.checks)
            if not report.passed:
                path = write_witness(args.witness_dir, name, report)
                failed.append(f"{name}: {', '.join(c.name for c in report.failures())} -> {path}")

    if failed:
        print(f"[verify] FAIL ({len(failed)} instances)")
        for line in failed:
            print(f"  - {line}")
        return VERIFICATION_FAILED
    print(f"[verify] OK (trials={args.trials}, n={args.size}, checks={checked})")
    return 0


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    settings = load_settings()
    if args.tol is not None:
        settings = settings.with_rel_eps(args.tol)

    try:
        if args.command == "analyze":
            return cmd_analyze(args, settings)
        return cmd_verify(args, settings)
    except TropicoreError as exc:
        print(f"error: {exc.message}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
