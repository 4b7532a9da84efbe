"""Command-line front end: ``horncalc <command> ...``.

Exit status is 0 on success, 1 when a verification fails or a comparison finds
a discrepancy that the command treats as fatal, 2 for usage and parse errors.
"""
from __future__ import annotations

import argparse
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .catalog import CatalogError, load_catalog, load_references
from .evaluation import EvalConfig, PoleError, eval_series
from .exprparse import ParseError, parse_number
from .frobenius import enumerate_exponents, indicial_system, particular_solutions
from .pde import ConsistencyError, derive_system, format_system
from .region import evaluate_region
from .series import format_definition, format_factor_list, horn_order, ratio_factors
from .verification import (
    RegionRefusal,
    compare_systems,
    describe_comparison,
    nondegenerate_bindings,
    residual_exact,
    residual_numeric,
)

DEFAULT_TOL = 1e-12
DEFAULT_MAX_SHELLS = 400
DEFAULT_EXACT_DEGREE = 10
DEFAULT_STEP = 1e-3


class UsageError(ValueError):
    pass


# --------------------------------------------------------------------------
# argument helpers


def parse_params(text: Optional[str]) -> dict:
    """``a=1/2,b=0.3`` -> {'a': Fraction(1, 2), 'b': Fraction(3, 10)}."""
    out = {}
    if not text:
        return out
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        if "=" not in item:
            raise UsageError(f"parameter assignment {item!r} needs the form name=value")
        name, val = (t.strip() for t in item.split("=", 1))
        try:
            out[name] = _rational(val)
        except (ValueError, ZeroDivisionError, ParseError):
            raise UsageError(f"cannot read value {val!r} for {name}") from None
    return out


def _rational(text: str) -> Fraction:
    neg = text.startswith("-")
    body = text[1:] if neg else text
    if "/" in body:
        a, b = body.split("/", 1)
        v = parse_number(a.strip()) / parse_number(b.strip())
    else:
        v = parse_number(body)
    return -v if neg else v


def parse_point(text: Optional[str], dim: int) -> tuple:
    if text is None:
        raise UsageError("--point is required")
    try:
        vals = tuple(float(v) for v in text.split(","))
    except ValueError:
        raise UsageError(f"cannot read point {text!r}") from None
    if len(vals) != dim:
        raise UsageError(f"point has {len(vals)} coordinates, series needs {dim}")
    return vals


def _check_binding(s, binding: dict) -> None:
    missing = [p for p in s.params if p not in binding]
    extra = [p for p in binding if p not in s.params]
    if extra:
        raise UsageError(f"{s.name} has no parameter(s) {', '.join(extra)}")
    if missing:
        raise UsageError(f"{s.name} needs values for {', '.join(missing)}")


# --------------------------------------------------------------------------
# commands


def cmd_list(args, cat, out, err) -> int:
    width = max((len(n) for n in cat.names()), default=4)
    out.write(f"{'name':<{width}}  dim  order  family\n")
    for name in cat.names():
        s = cat.get(name)
        out.write(f"{name:<{width}}  {s.dimension:>3}  {horn_order(s):>5}  {s.family or ''}\n")
    return 0


def cmd_show(args, cat, out, err) -> int:
    s = cat.get(args.name)
    out.write(format_definition(s) + "\n")
    out.write(f"# {s.name}({s.format_args()})\n")
    for axis in range(s.dimension):
        n, d = ratio_factors(s, axis)
        out.write(
            f"# ratio along {s.indices[axis]}: "
            f"{format_factor_list(n, s.indices)} / {format_factor_list(d, s.indices)}\n"
        )
    if s.region is None:
        out.write("# region: not recorded\n")
    return 0


def cmd_derive(args, cat, out, err) -> int:
    s = cat.get(args.name)
    out.write(format_system(derive_system(s), args.format) + ("\n" if args.format == "human" else ""))
    return 0


def cmd_eval(args, cat, out, err) -> int:
    s = cat.get(args.name)
    binding = parse_params(args.params)
    _check_binding(s, binding)
    point = parse_point(args.point, s.dimension)
    cfg = EvalConfig(tol=args.tol, max_shells=args.max_shells)
    res = eval_series(s, binding, point, cfg)
    out.write(f"value {res.value!r}\n")
    out.write(f"shells {res.shells_used}\n")
    out.write(f"tail_estimate {res.tail_estimate:.3e}\n")
    out.write(f"region {res.region_status}\n")
    if not res.converged:
        err.write(f"{s.name}: {res.message}\n")
        return 1
    return 0


def cmd_verify(args, cat, out, err) -> int:
    s = cat.get(args.name)
    system = derive_system(s)
    N = args.exact_degree
    if args.params:
        binding = parse_params(args.params)
        _check_binding(s, binding)
        bindings = [binding]
    else:
        bindings = nondegenerate_bindings(s, args.bindings, N, seed=args.seed)
    status = 0
    for b in bindings:
        shown = ", ".join(f"{k}={v}" for k, v in b.items())
        rep = residual_exact(system, s, b, N)
        if rep.ok:
            out.write(f"exact N={N} [{shown}]: annihilated through degree {N - 2}\n")
        else:
            status = 1
            e, idx, val = rep.violations[0]
            out.write(
                f"exact N={N} [{shown}]: {len(rep.violations)} nonzero coefficients, "
                f"first in equation {e + 1} at index {idx}: {val}\n"
            )
    if args.numeric:
        point = parse_point(args.point, s.dimension)
        b = bindings[0]
        try:
            rep = residual_numeric(system, s, b, point, args.step, EvalConfig(tol=args.tol, max_shells=args.max_shells))
        except RegionRefusal as exc:
            err.write(f"{exc}\n")
            return 1
        for i, rel in enumerate(rep.relative, 1):
            flag = "ok" if rel <= args.numeric_tol else "FAIL"
            out.write(f"numeric eq{i} at {point} h={args.step}: relative residual {rel:.3e} {flag}\n")
            if rel > args.numeric_tol:
                status = 1
    return status


def cmd_exponents(args, cat, out, err) -> int:
    s = cat.get(args.name)
    isys = indicial_system(s)
    out.write("indicial system:\n")
    for line in isys.format():
        out.write(f"  {line}\n")
    enum = enumerate_exponents(isys, args.include_coupled)
    for d in enum.diagnostics:
        err.write(f"note: {d}\n")
    out.write(f"exponent tuples ({len(enum.tuples)}):\n")
    for t in enum.tuples:
        out.write(f"  {t}\n")
    sols = particular_solutions(s, degree=args.exact_degree, include_coupled=args.include_coupled)
    out.write(f"particular solutions ({len(sols)}):\n")
    status = 0
    for i, sol in enumerate(sols, 1):
        mark = "verified" if sol.verified else "NOT verified"
        out.write(f"  u{i} = {sol.display(s.name)}    [{mark}]\n")
        for d in sol.diagnostics:
            err.write(f"u{i}: {d}\n")
        if not sol.verified:
            status = 1
    return status


def cmd_region(args, cat, out, err) -> int:
    s = cat.get(args.name)
    point = parse_point(args.point, s.dimension)
    if s.region is None:
        out.write("unknown\n")
        err.write(f"{s.name}: no region recorded\n")
        return 0
    status, diag = evaluate_region(s.region, point)
    out.write(status + "\n")
    for d in diag:
        err.write(f"{d}\n")
    return 0


# --------------------------------------------------------------------------
# audit


@dataclass
class AuditRow:
    name: str
    dimension: int
    order: int
    annihilation: str  # ok | FAIL | error
    comparison: list = field(default_factory=list)  # per-equation status, empty if no transcription
    details: list = field(default_factory=list)


def audit_entry(s, reference, degree: int, bindings: int, seed: int = 0) -> AuditRow:
    row = AuditRow(s.name, s.dimension, horn_order(s), "ok")
    try:
        system = derive_system(s)
    except ConsistencyError as exc:
        row.annihilation = "error"
        row.details.append(str(exc))
        return row
    try:
        for b in nondegenerate_bindings(s, bindings, degree, seed=seed):
            rep = residual_exact(system, s, b, degree)
            if not rep.ok:
                row.annihilation = "FAIL"
                e, idx, val = rep.violations[0]
                row.details.append(f"residual in equation {e + 1} at {idx}: {val}")
                break
    except (RuntimeError, PoleError) as exc:
        row.annihilation = "error"
        row.details.append(str(exc))
    if reference is not None:
        try:
            rep = compare_systems(system, reference)
        except ValueError as exc:
            row.comparison = ["discrepancy"]
            row.details.append(str(exc))
        else:
            row.comparison = rep.statuses()
            if not rep.ok:
                row.details.extend(describe_comparison(rep))
    return row


def _audit_job(job):
    return audit_entry(*job)


def cmd_audit(args, cat, out, err) -> int:
    refs = load_references(args.reference)
    names = args.names or cat.names()
    for n in names:
        cat.get(n)
    jobs = [(cat.get(n), refs.get(n), args.exact_degree, args.bindings, args.seed) for n in names]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as ex:
            rows = list(ex.map(_audit_job, jobs, chunksize=4))
    else:
        rows = [_audit_job(j) for j in jobs]
    width = max((len(r.name) for r in rows), default=4)
    out.write(f"{'name':<{width}}  dim  order  annihilation  comparison\n")
    counts = {"ok": 0, "FAIL": 0, "error": 0}
    cmp_counts = {"match": 0, "scaled-match": 0, "discrepancy": 0, "none": 0}
    for r in rows:
        counts[r.annihilation] += 1
        if not r.comparison:
            cmp = "no transcription"
            cmp_counts["none"] += 1
        else:
            worst = "discrepancy" if "discrepancy" in r.comparison else (
                "scaled-match" if "scaled-match" in r.comparison else "match")
            cmp_counts[worst] += 1
            cmp = ",".join(r.comparison)
        out.write(f"{r.name:<{width}}  {r.dimension:>3}  {r.order:>5}  {r.annihilation:<12}  {cmp}\n")
    for r in rows:
        for d in r.details:
            err.write(f"{r.name}: {d}\n")
    out.write(
        f"summary: {len(rows)} entries; annihilation ok {counts['ok']}, failed {counts['FAIL']}, "
        f"errors {counts['error']}; comparison match {cmp_counts['match']}, "
        f"scaled-match {cmp_counts['scaled-match']}, discrepancy {cmp_counts['discrepancy']}, "
        f"no transcription {cmp_counts['none']}\n"
    )
    if args.summary:
        with open(args.summary, "w", encoding="utf-8") as fh:
            fh.write("entry\tequation\tstatus\n")
            for r in rows:
                fh.write(f"{r.name}\tannihilation\t{r.annihilation}\n")
                for i, st in enumerate(r.comparison, 1):
                    fh.write(f"{r.name}\t{i}\t{st}\n")
    failed = counts["FAIL"] + counts["error"]
    if failed:
        return 1
    if args.strict and cmp_counts["discrepancy"]:
        return 1
    return 0


# --------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--catalog", action="append", default=[], metavar="PATH",
        help="extra catalog file or directory (repeatable); HORNCALC_CATALOG_PATH is also read",
    )
    common.add_argument("--no-shipped", action="store_true", help="do not load the shipped catalogs")

    numeric = argparse.ArgumentParser(add_help=False)
    numeric.add_argument("--tol", type=float, default=DEFAULT_TOL, help="series tolerance (default %(default)g)")
    numeric.add_argument(
        "--max-shells", type=int, default=DEFAULT_MAX_SHELLS, help="shell limit (default %(default)s)"
    )

    p = argparse.ArgumentParser(prog="horncalc", description="Horn-type hypergeometric series toolkit")
    sub = p.add_subparsers(dest="command", required=True)

    sub.add_parser("list", parents=[common], help="list series with dimension and Horn order")

    sp = sub.add_parser("show", parents=[common], help="show a definition, its ratios and region")
    sp.add_argument("name")

    sp = sub.add_parser("derive", parents=[common], help="derive the system of PDEs")
    sp.add_argument("name")
    sp.add_argument("--format", choices=["human", "structured"], default="human")

    sp = sub.add_parser("eval", parents=[common, numeric], help="evaluate a series numerically")
    sp.add_argument("name")
    sp.add_argument("--params", required=True, help="k=v,... assignments for every parameter")
    sp.add_argument("--point", required=True, help="x[,y[,z]]")

    sp = sub.add_parser("verify", parents=[common, numeric], help="check that the derived system annihilates the series")
    sp.add_argument("name")
    sp.add_argument(
        "--exact-degree", type=int, default=DEFAULT_EXACT_DEGREE,
        help="truncation degree N; residual checked through N-2 (default %(default)s)",
    )
    sp.add_argument("--params", help="rational parameter values; random ones are drawn if omitted")
    sp.add_argument("--bindings", type=int, default=3, help="number of random bindings (default %(default)s)")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--numeric", action="store_true", help="also run the finite-difference check")
    sp.add_argument("--point", help="x[,y[,z]] for --numeric")
    sp.add_argument("--step", type=float, default=DEFAULT_STEP, help="finite-difference step (default %(default)g)")
    sp.add_argument(
        "--numeric-tol", type=float, default=1e-6, help="relative residual bound (default %(default)g)"
    )

    sp = sub.add_parser("exponents", parents=[common], help="Frobenius exponents and particular solutions")
    sp.add_argument("name")
    sp.add_argument("--exact-degree", type=int, default=8, help="verification degree (default %(default)s)")
    sp.add_argument("--include-coupled", action="store_true", help="also solve with factors that mix axes")

    sp = sub.add_parser("region", parents=[common], help="inside/outside/unknown at a point")
    sp.add_argument("name")
    sp.add_argument("--point", required=True)

    sp = sub.add_parser("audit", parents=[common], help="derive, verify and compare a batch of entries")
    sp.add_argument("names", nargs="*", help="restrict to these series")
    sp.add_argument("--reference", metavar="DIR", help="directory of transcribed systems (*.pde)")
    sp.add_argument("--exact-degree", type=int, default=DEFAULT_EXACT_DEGREE)
    sp.add_argument("--bindings", type=int, default=3)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--jobs", type=int, default=1, help="worker processes (default %(default)s)")
    sp.add_argument("--summary", metavar="FILE", help="write a tab-separated entry/equation/status file")
    sp.add_argument("--strict", action="store_true", help="exit 1 on any discrepancy as well")
    return p


COMMANDS = {
    "list": cmd_list,
    "show": cmd_show,
    "derive": cmd_derive,
    "eval": cmd_eval,
    "verify": cmd_verify,
    "exponents": cmd_exponents,
    "region": cmd_region,
    "audit": cmd_audit,
}


def run(argv: Optional[Sequence[str]] = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cat = load_catalog(args.catalog, shipped=not args.no_shipped)
        return COMMANDS[args.command](args, cat, out, err)
    except (UsageError, CatalogError, ParseError) as exc:
        err.write(f"horncalc: {exc}\n")
        return 2
    except (PoleError, ConsistencyError, RuntimeError) as exc:
        err.write(f"horncalc: {exc}\n")
        return 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
