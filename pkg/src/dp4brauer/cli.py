"""Command-line entry point: analyze, construct, verify-paper, search-points."""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path
from typing import Optional, Sequence

from .arith import ArithmeticDomainError, NotFound, Place
from .construct import construct_for_S
from .localglobal.points import BudgetExceeded, search_rational_points
from .localglobal.verdicts import WorkingSetOptions
from .pencil import PencilDomainError
from .reference_checks import IDS, CheckContext, run_check
from .report import analyze, construct_report, render_text, validate
from .surface import Surface, SurfaceFormatError

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_INPUT = 2
EXIT_BUDGET = 3


class InputError(Exception):
    pass


def parse_places(text: str) -> list[Place]:
    t = text.strip().lower()
    if t in ("none", "", "{}"):
        return []
    try:
        return [Place.parse(x) for x in t.split(",") if x.strip()]
    except ArithmeticDomainError as exc:
        raise InputError(str(exc)) from exc


def read_surface(path: str) -> Surface:
    try:
        text = sys.stdin.read() if path == "-" else Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc
    try:
        return Surface.from_text(text)
    except (SurfaceFormatError, PencilDomainError, ArithmeticDomainError, ValueError) as exc:
        raise InputError(f"{path}: {exc}") from exc


def _options(args) -> WorkingSetOptions:
    return WorkingSetOptions(budget=args.budget, seed=args.seed)


def _emit_report(report: dict, args) -> int:
    validate(report)
    if args.format == "json":
        print(json.dumps(report, indent=2))
    else:
        print(render_text(report))
    if report["errors"] and report["brauer"] is None:
        return EXIT_INPUT
    if report["places"] is not None and not report["places"]["complete"]:
        return EXIT_BUDGET
    return EXIT_OK


def cmd_analyze(args) -> int:
    surface = read_surface(args.surface)
    return _emit_report(analyze(surface, _options(args)), args)


def cmd_construct(args) -> int:
    places = parse_places(args.places)
    try:
        cert = construct_for_S(places)
    except NotFound as exc:
        print(f"construction failed: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    if args.out:
        Path(args.out).write_text(cert.surface.to_text())
    report = construct_report(cert, _options(args))
    code = _emit_report(report, args)
    if code == EXIT_OK and report["places"]["working_set"] != [str(p) for p in cert.target]:
        print("working set differs from the target", file=sys.stderr)
        return EXIT_FAILED
    return code


def cmd_verify_paper(args) -> int:
    ids = IDS if args.id == "all" else [args.id]
    ctx = CheckContext(height=args.height, jobs=args.jobs, seed=args.seed, trials=args.trials, options=_options(args))
    failed = 0
    results = {}
    for ident in ids:
        t0 = time.perf_counter()
        try:
            assertions = run_check(ident, ctx)
        except BudgetExceeded as exc:
            print(f"{ident}: budget exceeded: {exc}", file=sys.stderr)
            return EXIT_BUDGET
        failed += sum(not a.passed for a in assertions)
        results[ident] = [{"name": a.name, "passed": a.passed, "detail": a.detail} for a in assertions]
        if args.format == "text":
            print(f"{ident} ({time.perf_counter() - t0:.1f}s)")
            for a in assertions:
                print("  " + a.line())
    if args.format == "json":
        print(json.dumps(results, indent=2))
    return EXIT_FAILED if failed else EXIT_OK


def cmd_search_points(args) -> int:
    surface = read_surface(args.surface)
    t0 = time.perf_counter()
    try:
        pts = search_rational_points(surface, args.height, jobs=args.jobs, budget=args.budget)
    except BudgetExceeded as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    lines = "".join(f"{p}\n" for p in pts)
    if args.out:
        Path(args.out).write_text(lines)
    else:
        sys.stdout.write(lines)
    print(f"{len(pts)} points of height <= {args.height} in {time.perf_counter() - t0:.1f}s", file=sys.stderr)
    return EXIT_OK


def _common(height: int = 200, budget: int = 200_000) -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    fmt = common.add_mutually_exclusive_group()
    fmt.add_argument("--json", dest="format", action="store_const", const="json", help="machine-readable output")
    fmt.add_argument("--text", dest="format", action="store_const", const="text", help="human-readable output (default)")
    common.set_defaults(format="text")
    common.add_argument("--budget", type=int, default=budget, help="search budget (p-adic nodes or point candidates)")
    common.add_argument("--seed", type=int, default=0, help="seed for sampling and random checks")
    common.add_argument("--jobs", type=int, default=1, help="worker processes for point searches")
    common.add_argument("--height", type=int, default=height, help="height bound for point searches")
    return common


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dp4brauer", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", parents=[_common()], help="pencil invariants, Brauer group and working set")
    p.add_argument("surface", help="surface file, or - for stdin")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("construct", parents=[_common()], help="build a surface whose class works exactly at given places")
    p.add_argument("--places", required=True, help="comma-separated places (primes, inf) or none")
    p.add_argument("--out", help="write the surface file here")
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("verify-paper", parents=[_common(height=1000)], help="re-check the reference results")
    p.add_argument("id", choices=list(IDS) + ["all"])
    p.add_argument("--trials", type=int, default=100, help="random trials for the randomized checks")
    p.set_defaults(func=cmd_verify_paper)

    p = sub.add_parser("search-points", parents=[_common(budget=2_000_000)], help="rational points of bounded height")
    p.add_argument("surface", help="surface file, or - for stdin")
    p.add_argument("--out", help="write the point list here")
    p.set_defaults(func=cmd_search_points)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return args.func(args)
    except InputError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
