"""Command-line interface.

Subcommands::

    symroof eval-roof     --family werner --a 0.75 --monotone vidal:1
    symroof eval-witness  --lambda 0.6,0.3,0.1 --target iso:0.95 --d 3
    symroof emit-figure   vidal-iso --d 5 --out vidal_iso.csv
    symroof verify        fast --seed 7

Exit codes: 0 success, 1 verification or solver failure, 2 bad arguments or
unsupported query, 3 output file could not be written.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import roofs, verify, witness
from .errors import (
    DomainError,
    IndeterminateRegimeError,
    RegistrationError,
    SolverError,
    StructuralError,
    UnsupportedQueryError,
)
from .families import Family, FamilyPoint, as_family
from .monotones import MonotoneSpec, parse_monotone
from .qcore import SchmidtVector
from .records import OutputRecord

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3
LAMBDA_SUM_TOL = 1e-9
EXIT_HELP = """exit codes:
  0  success
  1  verification failure or solver failure
  2  bad arguments, domain error or unsupported query (e.g. an open region)
  3  output file could not be written"""
FIGURES = ("vidal-iso", "t-opt", "oo-vidal-surface", "witness-curve")


def _default_seed():
    try:
        return int(os.environ.get("SYMROOF_SEED", "0"))
    except ValueError:
        return 0


def _g(x):
    return format(float(x), ".17g")


def _point(args) -> FamilyPoint:
    fam = as_family(args.family)
    return FamilyPoint(fam, args.d, a=args.a, b=args.b)


def _profile_for(spec, point, region):
    if region is roofs.Region.WERNER_ORBIT:
        return roofs.werner_minimizer(point.a, point.d)
    if region is roofs.Region.ISO_ORBIT:
        return roofs.iso_fiber_minimum(spec, point.b, point.d)[1]
    return None


def cmd_eval_roof(args) -> OutputRecord:
    spec = parse_monotone(args.monotone)
    point = _point(args)
    info = roofs.extended_roof_info(spec, point, continuous=args.continuous)
    profile = _profile_for(spec, point, info.region)
    cols = {"value": [info.value]}
    meta = {"family": point.family.value, "d": point.d, "a": point.a, "b": point.b,
            "monotone": spec.label, "region": info.region.value, "by_continuity": info.by_continuity}
    if profile is not None:
        meta["profile_kind"] = profile.kind.value
        meta["profile_schmidt"] = profile.schmidt.values
    return OutputRecord(_echo(args), cols, meta)


def _parse_lambda(text: str, normalize: bool) -> SchmidtVector:
    try:
        vals = np.array([float(v) for v in text.split(",") if v.strip()])
    except ValueError:
        raise StructuralError(f"cannot parse Schmidt vector {text!r}") from None
    if vals.size == 0:
        raise StructuralError("empty Schmidt vector")
    return SchmidtVector.from_values(vals, normalize=normalize, tol=LAMBDA_SUM_TOL)


def cmd_eval_witness(args) -> OutputRecord:
    lam = _parse_lambda(args.lam, args.normalize)
    kind, _, val = args.target.partition(":")
    kind = kind.strip().lower()
    meta = {"lambda": lam.values, "target": args.target}
    if kind in ("werner", "wer"):
        res = witness.pure_to_werner(lam, float(val))
    elif kind in ("iso", "isotropic"):
        d = args.d or lam.d
        res = witness.pure_to_isotropic_nogo(lam, float(val), d, seed=args.seed)
        meta["d"] = d
    elif kind in ("twoqubit", "two-qubit"):
        try:
            rho = np.load(val)
        except OSError as exc:
            raise StructuralError(f"cannot read density matrix {val!r}: {exc}") from None
        res = witness.pure_to_two_qubit(lam, rho)
    else:
        raise StructuralError(f"unknown target {args.target!r}; use werner:A, iso:B or twoqubit:FILE.npy")
    meta["verdict"] = res.verdict.value
    cols = {"value": [res.value]}
    if res.per_k is not None:
        meta["per_k"] = res.per_k
        meta["kkt_residual"] = res.diagnostics.get("kkt_residual")
    return OutputRecord(_echo(args), cols, meta)


def _grid(lo, hi, n):
    return np.linspace(lo, hi, n)


def cmd_emit_figure(args) -> OutputRecord:
    name, d, n = args.name, args.d, args.points
    if n < 2:
        raise DomainError("need at least two grid points")
    meta = {"figure": name, "d": d, "points": n, "seed": args.seed}
    if name == "vidal-iso":
        bs = _grid(0, 1, n)
        cols = {"b": bs}
        for k in range(1, d):
            cols[f"E{k}"] = np.array([roofs.iso_vidal_roof(k, b, d) for b in bs])
        return OutputRecord(_echo(args), cols, meta)
    if name == "t-opt":
        bs = _grid(1 / d, 1, n)
        cols = {"b": bs,
                "t_top_heavy": np.array([roofs.t_top_heavy(b, d) for b in bs]),
                "t_truncated": np.array([roofs.t_truncated(b, d)[0] for b in bs]),
                "k_truncated": np.array([roofs.t_truncated(b, d)[1] for b in bs], dtype=float)}
        return OutputRecord(_echo(args), cols, meta)
    if name == "oo-vidal-surface":
        a_s, b_s = _grid(0, 1, n), _grid(0, 1, n)
        A, B = np.meshgrid(a_s, b_s, indexing="ij")
        cols = {"a": A.ravel(), "b": B.ravel()}
        regions = []
        for k in range(1, d):
            spec = MonotoneSpec.vidal(k)
            vals = np.full(A.size, np.nan)
            for i, (a, b) in enumerate(zip(A.ravel(), B.ravel())):
                if a + b > 1 + 1e-12:
                    if k == 1:
                        regions.append("invalid")
                    continue
                p = FamilyPoint.oo(a, b, d)
                reg = roofs.region_membership(p)
                if k == 1:
                    regions.append(reg.value)
                if reg is not roofs.Region.UNKNOWN:
                    vals[i] = roofs.extended_roof(spec, p)
            cols[f"E{k}"] = vals
        meta["region"] = regions
        return OutputRecord(_echo(args), cols, meta)
    if name == "witness-curve":
        lam = _parse_lambda(args.lam, args.normalize)
        bs = _grid(1 / d, 1, n)
        vals = np.array([witness.pure_to_isotropic_nogo(lam, b, d, starts=args.starts, seed=args.seed).value
                         for b in bs])
        meta["lambda"] = lam.values
        sign = np.flatnonzero((vals[:-1] >= 0) & (vals[1:] < 0))
        if sign.size:
            j = sign[0]
            meta["zero_crossing"] = witness.witness_zero_crossing(
                lam, d, lo=bs[j], hi=bs[j + 1], tol=1e-7, starts=args.starts, seed=args.seed)
        else:
            meta["zero_crossing"] = None
        return OutputRecord(_echo(args), {"b": bs, "W": vals}, meta)
    raise StructuralError(f"unknown figure {name!r}")


def cmd_verify(args) -> int:
    results = verify.run(full=args.suite == "full", seed=args.seed)
    width = max(len(r[0]) for r in results)
    print(f"symroof verify {args.suite} --seed {args.seed}")
    for ident, ok, detail in results:
        print(f"{'PASS' if ok else 'FAIL'}  {ident:<{width}}  {detail}")
    failed = [r[0] for r in results if not r[1]]
    if args.out:
        rec = OutputRecord(_echo(args), {"passed": [float(r[1]) for r in results]},
                           {"suite": args.suite, "seed": args.seed,
                            "checks": [{"id": i, "passed": ok, "detail": det} for i, ok, det in results]})
        try:
            rec.write(args.out, fmt="json")
        except OSError as exc:
            print(f"error: cannot write {args.out}: {exc}", file=sys.stderr)
            return EXIT_IO
    if failed:
        print("failed: " + ", ".join(failed))
        return EXIT_FAIL
    print(f"all {len(results)} checks passed")
    return EXIT_OK


def _echo(args) -> str:
    return "symroof " + " ".join(sys.argv[1:]) if args.argv is None else "symroof " + " ".join(args.argv)


def _print_record(rec: OutputRecord, as_json: bool):
    if as_json:
        print(rec.to_json())
        return
    meta = dict(rec.metadata)
    meta.pop("timestamp", None)
    for k, v in rec.columns.items():
        if len(v) == 1:
            print(f"{k}: {_g(v[0])}")
    for k, v in meta.items():
        if v is None:
            continue
        if isinstance(v, np.ndarray):
            v = "[" + ", ".join(_g(x) if np.isfinite(x) else "nan" for x in v) + "]"
        elif isinstance(v, float):
            v = _g(v)
        print(f"{k}: {v}")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="symroof", description="Convex roofs and conversion witnesses on symmetric states",
                                epilog=EXIT_HELP, formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--seed", type=int, default=None, help="random seed (default: $SYMROOF_SEED or 0)")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("eval-roof", help="convex roof of a monotone at a family point")
    r.add_argument("--family", required=True, choices=[f.value for f in Family] + ["iso"])
    r.add_argument("--a", type=float)
    r.add_argument("--b", type=float)
    r.add_argument("--d", type=int, default=2)
    r.add_argument("--monotone", required=True, help="vidal:K, renyi:ALPHA, entropy, concurrence:K or concurrence:d")
    r.add_argument("--continuous", action="store_true", help="allow extension by continuity")

    w = sub.add_parser("eval-witness", help="LOCC conversion witness from a pure state")
    w.add_argument("--lambda", dest="lam", required=True, help="comma-separated Schmidt coefficients")
    w.add_argument("--target", required=True, help="werner:A, iso:B or twoqubit:FILE.npy")
    w.add_argument("--d", type=int, default=None)
    w.add_argument("--normalize", action="store_true", help="rescale lambda to sum to one")

    f = sub.add_parser("emit-figure", help="write a figure dataset")
    f.add_argument("name", choices=FIGURES)
    f.add_argument("--d", type=int, default=None)
    f.add_argument("--lambda", dest="lam", default="0.6,0.3,0.1")
    f.add_argument("--normalize", action="store_true")
    f.add_argument("--points", type=int, default=201)
    f.add_argument("--starts", type=int, default=32, help="multi-starts per witness subproblem")

    v = sub.add_parser("verify", help="run the invariant suite")
    v.add_argument("suite", choices=("fast", "full"))
    v.add_argument("--out", default=None, help="also write the report as JSON")

    for sp in (r, w, f, v):
        sp.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    for sp in (r, w, f):
        sp.add_argument("--out", default=None, help="write the record to this path (.csv or .json)")
        sp.add_argument("--json", action="store_true", help="print the record as JSON")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    args.argv = argv
    if args.seed is None:
        args.seed = _default_seed()
    try:
        if args.command == "verify":
            return cmd_verify(args)
        if args.command == "eval-roof":
            rec = cmd_eval_roof(args)
        elif args.command == "eval-witness":
            rec = cmd_eval_witness(args)
        else:
            if args.d is None:
                args.d = 3 if args.name == "witness-curve" else 5
            rec = cmd_emit_figure(args)
            if args.out is None:
                args.out = args.name + (".json" if args.name == "oo-vidal-surface" else ".csv")
    except (DomainError, StructuralError, RegistrationError, UnsupportedQueryError,
            IndeterminateRegimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SolverError as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    if args.out:
        try:
            rec.write(args.out)
        except OSError as exc:
            print(f"error: cannot write {args.out}: {exc}", file=sys.stderr)
            return EXIT_IO
        if args.command == "emit-figure":
            print(f"wrote {args.out}")
            if "zero_crossing" in rec.metadata:
                print(f"zero_crossing: {rec.metadata['zero_crossing']}")
            return EXIT_OK
    _print_record(rec, args.json)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
