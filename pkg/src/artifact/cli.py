"""Command-line front end.

Exit codes: 0 when every certificate passes, 1 when one fails, 2 on bad input.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from fractions import Fraction
from pathlib import Path
from typing import Any, Sequence

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from . import __version__
from .arrangement import Arrangement, NotABasis, enumerate_arrangement, gale_dual, lattice_isomorphic, validate
from .dmod import (
    FitFailure,
    annihilation_sweep,
    appendix_check,
    random_rank_certificate,
    trace_functional,
    trace_functionals,
    verma_character,
)
from .hea import NonGenericParameter, b_algebra_points, generic_points
from .qside import duality_certificate
from .springer import UnsupportedType, springer_report

SCHEMA_VERSION = "1.0"
EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class InputError(ValueError):
    """Raised for unreadable or invalid input files and arguments."""

    def __init__(self, message: str, details: dict | None = None):
        super().__init__(message)
        self.details = details


# ---------------------------------------------------------------------------
# input
# ---------------------------------------------------------------------------


def load_table(path: str) -> dict:
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    try:
        if p.suffix == ".json" or text.lstrip().startswith("{"):
            data = json.loads(text)
        else:
            data = tomllib.loads(text)
    except (json.JSONDecodeError, tomllib.TOMLDecodeError) as exc:
        raise InputError(f"cannot parse {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise InputError("the input must be a table with keys gamma, theta, xi")
    return data


def _int_list(value: Any, name: str) -> list[int]:
    if not isinstance(value, list) or not all(isinstance(x, int) and not isinstance(x, bool) for x in value):
        raise InputError(f"{name} must be a list of integers")
    return value


def load_arrangement(path: str) -> tuple[Arrangement, dict]:
    """Parse and validate; returns the arrangement and the validation report."""
    data = load_table(path)
    missing = [k for k in ("gamma", "theta", "xi") if k not in data]
    if missing:
        raise InputError(f"missing keys: {', '.join(missing)}")
    gamma = data["gamma"]
    if not isinstance(gamma, list) or not gamma:
        raise InputError("gamma must be a nonempty list of rows")
    gamma = [_int_list(row, "each gamma row") for row in gamma]
    theta = _int_list(data["theta"], "theta")
    xi = _int_list(data["xi"], "xi")
    report = validate(gamma, theta, xi)
    if not report.ok:
        failed = "; ".join(f"{c.name}: {c.witness}" for c in report.failures())
        raise InputError(f"invalid arrangement ({failed})", {"validation": report.to_dict()})
    return Arrangement(gamma, theta, xi), report.to_dict()


def parse_fractions(text: str) -> tuple[Fraction, ...]:
    try:
        return tuple(Fraction(x) for x in text.split(",") if x.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"cannot parse rational list {text!r}") from exc


def parse_indices(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) - 1 for x in text.split(",") if x.strip())
    except ValueError as exc:
        raise InputError(f"cannot parse index list {text!r}") from exc


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------


def _jsonable(x):
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return x


def emit(report: dict, args: argparse.Namespace) -> None:
    report = {"schema_version": SCHEMA_VERSION, "version": __version__, **report}
    text = json.dumps(_jsonable(report), sort_keys=True, indent=2)
    if getattr(args, "report", None):
        Path(args.report).write_text(text + "\n")
    if args.json:
        print(text)
    else:
        for line in report.get("summary", []):
            print(line)
        print("PASS" if report.get("ok") else "FAIL")


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def cmd_verify(args: argparse.Namespace) -> int:
    arr, validation = load_arrangement(args.input)
    rng = random.Random(args.seed)
    summary = []

    enum = enumerate_arrangement(arr)
    duality = duality_certificate(arr)
    summary.append(f"duality certificate: {'pass' if duality.ok else 'fail'}")

    ranks = []
    for _ in range(args.trials):
        ranks.append(random_rank_certificate(arr, rng))
    rank_ok = all(r.passed for r in ranks)
    summary.append(f"rank certificates ({args.trials}): {'pass' if rank_ok else 'fail'}")

    c, _ = generic_points(arr, rng)
    tfs = trace_functionals(arr, c)
    sweep = annihilation_sweep(arr, tfs, args.truncation)
    summary.append(f"trace annihilation at D={args.truncation}: {'pass' if sweep['passed'] else 'fail'}")

    appendix = appendix_check(arr, rng)
    summary.append(f"highest-weight differences: {'pass' if appendix.passed else 'fail'}")

    ok = duality.ok and rank_ok and sweep["passed"] and appendix.passed
    emit({
        "command": "verify",
        "input": arr.to_dict(),
        "seed": args.seed,
        "validation": validation,
        "enumeration": enum.to_dict(),
        "duality": duality.to_dict(),
        "rank": [r.to_dict() for r in ranks],
        "annihilation": {"c": [str(x) for x in c], **sweep},
        "appendix": appendix.to_dict(),
        "summary": summary,
        "ok": ok,
    }, args)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_dualize(args: argparse.Namespace) -> int:
    arr, _ = load_arrangement(args.input)
    dual = gale_dual(arr)
    duality = duality_certificate(arr)
    double = gale_dual(dual)
    table = duality.to_dict()["bijection"]
    round_trip = double == arr
    summary = [f"dual gamma: {[list(r) for r in dual.gamma]}", f"bijection rows: {len(table)}"]
    if args.output:
        Path(args.output).write_text(json.dumps(dual.to_dict(), sort_keys=True, indent=2) + "\n")
    ok = duality.bijective
    emit({
        "command": "dualize",
        "input": arr.to_dict(),
        "dual": dual.to_dict(),
        "bijection": table,
        "round_trip_identical": round_trip,
        "round_trip_lattice_isomorphic": lattice_isomorphic(double, arr),
        "summary": summary,
        "ok": ok,
    }, args)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_character(args: argparse.Namespace) -> int:
    arr, _ = load_arrangement(args.input)
    basis = tuple(sorted(parse_indices(args.basis)))
    if basis not in arr.bases:
        raise InputError(f"{[i + 1 for i in basis]} is not a basis; bases are {[[i + 1 for i in b] for b in arr.bases]}")
    if args.c is None:
        c, points = generic_points(arr, random.Random(args.seed))
    else:
        c = parse_fractions(args.c)
        if len(c) != len(arr.kernel):
            raise InputError(f"c must have {len(arr.kernel)} entries")
        points = b_algebra_points(arr, c)
    tf = trace_functional(arr, basis, c, points)
    chi = verma_character(arr, tf, args.truncation)
    sweep = annihilation_sweep(arr, [tf], args.truncation)
    emit({
        "command": "character",
        "input": arr.to_dict(),
        "functional": tf.to_dict(),
        "character": str(chi),
        "terms": [{"exponent": [str(x) for x in mu], "coefficient": str(p)} for mu, p in chi.items()],
        "annihilation": sweep,
        "summary": [f"character: {chi}", f"annihilation: {'pass' if sweep['passed'] else 'fail'}"],
        "ok": sweep["passed"],
    }, args)
    return EXIT_OK if sweep["passed"] else EXIT_FAIL


def cmd_springer(args: argparse.Namespace) -> int:
    try:
        report = springer_report(args.type, args.degree, args.trials, args.seed)
    except UnsupportedType as exc:
        raise InputError(f"unsupported rank or type: {exc}") from exc
    summary = [f"{i['name']}: {'pass' if i['ok'] else 'fail'}" for i in report["identities"]]
    emit({"command": "springer", **report, "summary": summary}, args)
    return EXIT_OK if report["ok"] else EXIT_FAIL


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return value


def _non_negative(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError("must be non-negative")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="artifact", description="Certificates for hypertoric and Springer examples.")
    parser.add_argument("--version", action="version", version=__version__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--truncation", type=_non_negative, default=12, help="truncation level D (default 12)")
    common.add_argument("--trials", type=_positive, default=3, help="random trials (default 3)")
    common.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
    common.add_argument("--json", action="store_true", help="print the JSON report")
    common.add_argument("--report", help="also write the JSON report to this path")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", parents=[common], help="run every hypertoric certificate")
    p.add_argument("input")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("dualize", parents=[common], help="Gale dual and cocircuit/circuit table")
    p.add_argument("input")
    p.add_argument("--output", help="write the dual arrangement here (JSON)")
    p.set_defaults(func=cmd_dualize)

    p = sub.add_parser("character", parents=[common], help="Verma character of one fixed point")
    p.add_argument("input")
    p.add_argument("--basis", required=True, help="1-based row indices, e.g. 1,3")
    p.add_argument("--c", help="central parameter, comma separated rationals (default: random generic)")
    p.set_defaults(func=cmd_character)

    p = sub.add_parser("springer", parents=[common], help="Springer-side identities (A1, A2, B2)")
    p.add_argument("type")
    p.add_argument("--degree", type=_positive, help="test degree for the operator identities")
    p.set_defaults(func=cmd_springer)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "verify" and args.truncation < 1:
        parser.error("--truncation must be at least 1 for verify")
    try:
        return args.func(args)
    except InputError as exc:
        error = {"schema_version": SCHEMA_VERSION, "error": "input", "message": str(exc)}
        if exc.details:
            error["details"] = exc.details
        print(json.dumps(error, sort_keys=True), file=sys.stderr)
        return EXIT_INPUT
    except (NotABasis, NonGenericParameter, FitFailure) as exc:
        print(json.dumps({"schema_version": SCHEMA_VERSION, "error": type(exc).__name__, "message": str(exc)},
                         sort_keys=True), file=sys.stderr)
        return EXIT_INPUT if isinstance(exc, NotABasis) else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
