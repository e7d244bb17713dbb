"""Command-line interface.

Exit codes: 0 success, 2 input error, 3 internal invariant failure,
4 inequality violation.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import os
import sys
import time
from pathlib import Path

from . import __version__
from .casorati_delta import (
    CONVENTIONS,
    KINDS,
    ExtremizeConfig,
    delta_casorati,
    extremize_hyperplane,
    hyperplane_extrema,
    oracle_extremum,
)
from .invariants import invariant_report
from .serialization import InstanceFormatError, dumps, instance_to_doc, read_instance
from .slant_model import make_instance
from .verifier import (
    EQUALITY_TOL,
    InvariantCheckError,
    build_equality_case,
    check_inequality,
    checked_scalar_curvature,
    hessian_spectrum,
    inequality_sweep,
    solve_critical_system,
)

EXIT_OK, EXIT_INPUT, EXIT_INVARIANT, EXIT_VIOLATION = 0, 2, 3, 4


class InputError(Exception):
    pass


def parse_angle(token: str) -> float:
    """Parse '0.5', 'pi', 'pi/6' or '2*pi/3' into radians."""
    tok = token.strip().lower()
    if "pi" not in tok:
        return float(tok)
    num, _, den = tok.partition("/")
    coef = num.replace("pi", "").rstrip("*").strip() or "1"
    return float(coef) * math.pi / (float(den) if den else 1.0)


def _float_list(text: str, parse=float) -> list[float]:
    try:
        return [parse(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise InputError(f"cannot parse list {text!r}: {exc}") from exc


def _resolve_seed(seed: int | None) -> int:
    if seed is not None:
        return seed
    env = os.environ.get("CASORATI_SEED")
    if env is None:
        return 0
    try:
        return int(env)
    except ValueError as exc:
        raise InputError(f"CASORATI_SEED must be an integer, got {env!r}") from exc


def _emit(text: str, output: str | None) -> None:
    if output:
        Path(output).write_text(text)
    else:
        sys.stdout.write(text)


def _envelope(command: str, seed: int, started: float, **body) -> dict:
    return {
        "command": command,
        "tool": {"name": "casorati", "version": __version__},
        "seed": seed,
        "wall_time": time.perf_counter() - started,
        **body,
    }


def _load(path: str):
    try:
        return read_instance(path)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    except InstanceFormatError as exc:
        raise InputError(str(exc)) from exc


def cmd_invariants(args) -> int:
    started = time.perf_counter()
    seed = _resolve_seed(args.seed)
    inst, meta = _load(args.instance)
    checked_scalar_curvature(inst)
    body = {"input": instance_to_doc(inst, **meta), "invariants": invariant_report(inst), "proper": inst.proper}
    if inst.n >= 3:
        extrema = hyperplane_extrema(inst.sff, seed)
        body["inf_casorati_hyperplane"] = extrema["inf"].value
        body["sup_casorati_hyperplane"] = extrema["sup"].value
        body["extrema"] = extrema
    _emit(dumps(_envelope("invariants", seed, started, **body)), args.output)
    return EXIT_OK


def cmd_check(args) -> int:
    started = time.perf_counter()
    seed = _resolve_seed(args.seed)
    inst, meta = _load(args.instance)
    n = inst.n
    if n < 3:
        raise InputError("the inequalities need n >= 3")
    if args.bound == "generalized":
        if args.r is None:
            raise InputError("--r is required for the generalized inequalities")
        if args.r <= 0:
            raise InputError(f"r must be positive, got {args.r}")
        if args.r == n * (n - 1):
            raise InputError(f"r = n(n-1) = {n * (n - 1)} excluded by definition")
    extrema = hyperplane_extrema(inst.sff, seed)
    if args.bound == "generalized":
        reports = [check_inequality(inst, args.r, seed, convention=args.convention, tol=args.tolerance, extrema=extrema)]
        r_delta = args.r
    else:
        reports = [
            check_inequality(inst, None, seed, bound_kind=kind, convention=args.convention, tol=args.tolerance, extrema=extrema)
            for kind in ("normalized_inf", "normalized_sup")
        ]
        r_delta = n * (n - 1) / 2
    body = {
        "input": instance_to_doc(inst, **meta),
        "proper": inst.proper,
        "hypothesis": "proper slant" if inst.proper else "non-proper, outside the theorem's hypothesis",
        "invariants": invariant_report(inst),
        "deltas": delta_casorati(inst, r_delta, args.convention, seed, extrema=extrema),
        "verification": reports,
        "tolerance": args.tolerance,
    }
    if args.proof and args.bound == "generalized" and args.r < n * (n - 1):
        body["proof"] = hessian_spectrum(n, args.r, seed)
    _emit(dumps(_envelope("check", seed, started, **body)), args.output)
    violated = any(rep.slack < -args.tolerance * (1.0 + abs(rep.rhs)) for rep in reports)
    return EXIT_VIOLATION if violated else EXIT_OK


SWEEP_COLUMNS = (
    "index", "seed", "c", "theta", "r", "proper", "status", "bound_kind",
    "lhs", "rhs", "slack", "equality_detected", "quasi_umbilical", "message",
)


def _sweep_row(rec) -> dict:
    rep = rec.report
    return {
        "index": rec.index,
        "seed": rec.seed,
        "c": rec.c,
        "theta": rec.theta,
        "r": rec.r,
        "proper": rec.proper,
        "status": rec.status,
        "bound_kind": rep.bound_kind if rep else "",
        "lhs": rep.lhs if rep else None,
        "rhs": rep.rhs if rep else None,
        "slack": rep.slack if rep else None,
        "equality_detected": rep.equality_detected if rep else None,
        "quasi_umbilical": rep.quasi_umbilical if rep else None,
        "message": rec.message,
    }


def cmd_sweep(args) -> int:
    started = time.perf_counter()
    seed = _resolve_seed(args.seed)
    if args.count < 1:
        raise InputError("--count must be >= 1")
    c_list = _float_list(args.c_list)
    thetas = _float_list(args.theta_grid, parse_angle)
    r_grid = _float_list(args.r_grid)
    n = args.n
    for r in r_grid:
        if r <= 0 or r == n * (n - 1):
            raise InputError(f"invalid r = {r} (must be positive and != n(n-1))")
    for theta in thetas:
        if not 0 <= theta <= math.pi / 2:
            raise InputError(f"theta = {theta} outside [0, pi/2]")
    try:
        records = inequality_sweep(
            n, args.m, c_list, thetas, r_grid, args.count, seed,
            amplitude=args.amplitude, convention=args.convention, tol=args.tolerance, workers=args.workers,
        )
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    rows = [_sweep_row(rec) for rec in records]
    slacks = [row["slack"] for row in rows if row["slack"] is not None]
    summary = {
        "records": len(rows),
        "min_slack": min(slacks) if slacks else None,
        "violations": sum(row["status"] == "violation" for row in rows),
        "errors": sum(row["status"] == "error" for row in rows),
        "non_proper": sum(not row["proper"] for row in rows),
    }
    if args.out == "json":
        _emit(dumps(_envelope("sweep", seed, started, summary=summary, records=rows)), args.output)
    else:
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=SWEEP_COLUMNS, lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in row.items()})
        _emit(buf.getvalue(), args.output)
        print(
            f"# summary: records={summary['records']} min_slack={summary['min_slack']!r} "
            f"violations={summary['violations']} errors={summary['errors']}",
            file=sys.stderr,
        )
    return EXIT_VIOLATION if summary["violations"] else EXIT_OK


def cmd_proof(args) -> int:
    started = time.perf_counter()
    seed = _resolve_seed(args.seed)
    n, r = args.n, args.r
    if n < 3 or not 0 < r < n * (n - 1):
        raise InputError(f"need n >= 3 and 0 < r < n(n-1) = {n * (n - 1)}, got n={n}, r={r}")
    report = hessian_spectrum(n, r, seed)
    crit = solve_critical_system(n, r)
    table = [
        {"expected": e, "numeric": v, "abs_error": abs(e - v)}
        for e, v in zip(report.expected_eigs, report.hessian_eigs)
    ]
    body = {
        "proof": report,
        "spectrum_table": table,
        "max_eig_error": report.max_eig_error,
        "critical_determinant": crit.determinant,
    }
    _emit(dumps(_envelope("proof", seed, started, **body)), args.output)
    ok = report.max_eig_error <= 1e-9 and abs(report.p_at_critical) <= 1e-10
    return EXIT_OK if ok else EXIT_INVARIANT


def cmd_equality(args) -> int:
    try:
        sff = build_equality_case(args.n, args.m, args.r, args.a)
        inst = make_instance(args.n, args.m, args.c, parse_angle(args.theta), sff)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    label = f"equality case n={args.n} m={args.m} r={args.r!r} a={args.a!r}"
    _emit(dumps(instance_to_doc(inst, label=label)), args.out)
    return EXIT_OK


def cmd_oracle_compare(args) -> int:
    started = time.perf_counter()
    seed = _resolve_seed(args.seed)
    inst, meta = _load(args.instance)
    if inst.n not in (3, 4, 5):
        raise InputError(f"the oracle supports n in {{3, 4, 5}}, got n={inst.n}")
    kinds = KINDS if args.kind == "both" else (args.kind,)
    rows = []
    for kind in kinds:
        opt = extremize_hyperplane(inst.sff, kind, seed, ExtremizeConfig())
        try:
            orc = oracle_extremum(inst.sff, kind, args.resolution)
        except ValueError as exc:
            raise InputError(str(exc)) from exc
        rows.append({"kind": kind, "optimizer": opt.value, "oracle": orc, "gap": opt.value - orc,
                     "normal": opt.hyperplane.normal})
    _emit(dumps(_envelope("oracle-compare", seed, started, input=instance_to_doc(inst, **meta), comparisons=rows)),
          args.output)
    for row in rows:
        print(f"# {row['kind']}: gap {row['gap']:.3e}", file=sys.stderr)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="casorati",
        description="Curvature invariants and delta-Casorati inequalities of slant submanifolds "
        "in quaternionic space forms.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, *, output=True):
        p.add_argument("--seed", type=int, default=None, help="RNG seed (falls back to $CASORATI_SEED, then 0)")
        if output:
            p.add_argument("--output", "-o", default=None, help="write the report here instead of stdout")

    p = sub.add_parser("invariants", help="tau, rho, |H|^2, C and inf/sup C(L) of an instance file")
    p.add_argument("instance")
    common(p)
    p.set_defaults(func=cmd_invariants)

    p = sub.add_parser("check", help="verify the inequality and classify equality")
    p.add_argument("instance")
    p.add_argument("--r", type=float, default=None)
    p.add_argument("--bound", choices=("generalized", "normalized"), default="generalized")
    p.add_argument("--convention", choices=CONVENTIONS, default="paper")
    p.add_argument("--tolerance", type=float, default=EQUALITY_TOL,
                   help=f"relative equality/violation threshold (default {EQUALITY_TOL:g})")
    p.add_argument("--proof", action="store_true", help="include the Hessian spectrum check")
    common(p)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("sweep", help="bulk inequality check over random instances")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--c-list", default="-4,0,4")
    p.add_argument("--theta-grid", default="pi/6,pi/4,pi/3", help="comma list; accepts forms like pi/6")
    p.add_argument("--r-grid", default="2,6,11,18,30")
    p.add_argument("--count", type=int, default=100)
    p.add_argument("--amplitude", type=float, default=1.0)
    p.add_argument("--convention", choices=CONVENTIONS, default="paper")
    p.add_argument("--tolerance", type=float, default=EQUALITY_TOL,
                   help=f"relative equality/violation threshold (default {EQUALITY_TOL:g})")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", choices=("csv", "json"), default="json")
    common(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("proof", help="critical points and Hessian spectrum of the quadratic polynomial")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--r", type=float, required=True)
    common(p)
    p.set_defaults(func=cmd_proof)

    p = sub.add_parser("equality", help="write an equality-case instance file")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--r", type=float, required=True)
    p.add_argument("--a", type=float, default=1.0)
    p.add_argument("--c", type=float, default=0.0)
    p.add_argument("--theta", default="pi/4")
    p.add_argument("--out", default=None, help="output path (stdout if omitted)")
    p.set_defaults(func=cmd_equality)

    p = sub.add_parser("oracle-compare", help="optimizer vs brute-force oracle for inf/sup C(L)")
    p.add_argument("instance")
    p.add_argument("--kind", choices=(*KINDS, "both"), default="both")
    p.add_argument("--resolution", type=int, default=None)
    common(p)
    p.set_defaults(func=cmd_oracle_compare)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except InvariantCheckError as exc:
        print(f"internal invariant failure: {exc}", file=sys.stderr)
        return EXIT_INVARIANT


if __name__ == "__main__":
    sys.exit(main())
