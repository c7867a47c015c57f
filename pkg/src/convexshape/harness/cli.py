"""Command line entry point: ``convexshape {compute,verify,sweep,table2,suite}``."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from ..geometry import ConvexPolygon
from ..inequalities import verify
from .families import DEFAULT_RESOLUTION, FamilySpec, realize
from .runs import SweepError, compute, run_suite, sweep, table2_report

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


def load_shape(text: str, resolution: int = DEFAULT_RESOLUTION):
    """``family:<spec>`` or a path to a polygon JSON file."""
    if text.startswith("family:"):
        spec = FamilySpec.parse(text[len("family:"):], resolution)
        return realize(spec), spec.label
    path = Path(text)
    return ConvexPolygon.from_json(path.read_text()), path.stem


def _emit(doc, out: str | None) -> None:
    text = json.dumps(doc, indent=2) + "\n"
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _parse_params(text: str) -> list[float]:
    return [float(x) for x in text.replace(",", " ").split()]


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="convexshape", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("compute", help="measurements, FEM functionals and bounds as JSON")
    c.add_argument("--shape", required=True, help="polygon JSON file or family:<kind>:<params>")
    c.add_argument("--fem-tol", type=float, default=1e-8)
    c.add_argument("--resolution", type=int, default=DEFAULT_RESOLUTION)

    v = sub.add_parser("verify", help="inequality report as JSON; exit 0 iff every entry passes")
    v.add_argument("--shape", required=True)
    v.add_argument("--tol", type=float, default=1e-9, help="floor for FEM-dependent tolerances")
    v.add_argument("--fem-tol", type=float, default=1e-8)
    v.add_argument("--resolution", type=int, default=DEFAULT_RESOLUTION)

    s = sub.add_parser("sweep", help="CSV of functionals over a parameter list")
    s.add_argument("--family", required=True, help="spec template, e.g. 'rectangle:1:{}' or 'sector'")
    s.add_argument("--param", required=True, help="comma separated parameter values")
    s.add_argument("--ratio", action="append", default=[], help="extra column such as gap1/alpha or gap2/beta^4")
    s.add_argument("--out", help="CSV path (stdout if omitted)")
    s.add_argument("--fem-tol", type=float, default=1e-8)
    s.add_argument("--resolution", type=int, default=DEFAULT_RESOLUTION)

    t = sub.add_parser("table2", help="pipeline against the thin-family closed forms")
    t.add_argument("--out")
    t.add_argument("--fem-tol", type=float, default=1e-8)

    u = sub.add_parser("suite", help="verify fixed shapes and N random polygons")
    u.add_argument("--seeds", type=int, default=200)
    u.add_argument("--no-fixed", action="store_true", help="skip the fixed reference shapes")
    u.add_argument("--out")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "compute":
            shape, label = load_shape(args.shape, args.resolution)
            _emit(compute(shape, args.fem_tol, label), None)
            return EXIT_OK
        if args.command == "verify":
            shape, label = load_shape(args.shape, args.resolution)
            report = verify(shape, args.tol, label=label, fem_tol=args.fem_tol)
            _emit(report.to_dict(), None)
            return EXIT_OK if report.passed else EXIT_FAIL
        if args.command == "sweep":
            text = sweep(args.family, _parse_params(args.param), args.ratio, fem_tol=args.fem_tol,
                         boundary_resolution=args.resolution)
            if args.out:
                Path(args.out).write_text(text)
            else:
                sys.stdout.write(text)
            return EXIT_OK
        if args.command == "table2":
            doc = table2_report(args.fem_tol)
            _emit(doc, args.out)
            return EXIT_OK if doc["pass"] else EXIT_FAIL
        if args.command == "suite":
            if args.seeds < 0:
                raise ValueError("--seeds must be non-negative")
            result = run_suite(args.seeds, include_fixed=not args.no_fixed)
            _emit(result.to_dict(), args.out)
            return EXIT_OK if result.passed else EXIT_FAIL
    except SweepError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except (OSError, ValueError, KeyError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
