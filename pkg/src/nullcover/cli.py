"""Command-line front end: construct, verify and sweep covering complements.

Subcommands
    bias-set      parameter selection + Gauss-sum complement certificate
    cover         randomized covering complement for a grid family
    dimension     logarithmic-dimension estimate for a dyadic cube set
    rrp           recursive-rectangles construction trace
    full-measure  full-measure cascade trace
    verify        re-validate a serialized trace from the stored sets

Exit status: 0 when every certificate passes, 1 on a certificate failure,
2 on usage errors.  Rational parameters are "p/q" strings and stay exact
until the floating kernels; randomized subcommands require --seed.  Output
files are written atomically and are byte-reproducible for a fixed seed.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from fractions import Fraction

import numpy as np


def _rational(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a rational: {text!r}") from exc


def _write_atomic(path: str, payload: str):
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".nullcover-")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(payload)
        os.replace(tmp, path)
    except BaseException:
        os.unlink(tmp)
        raise


def _emit(data: dict, out: str | None, fmt: str):
    if fmt == "json":
        payload = json.dumps(data, indent=2, sort_keys=True) + "\n"
    else:
        rows = data["rows"] if "rows" in data else [data]
        keys = sorted({k for r in rows for k in r if not isinstance(r[k], (dict, list))})
        lines = [",".join(keys)]
        for r in rows:
            lines.append(",".join(str(r.get(k, "")) for k in keys))
        payload = "\n".join(lines) + "\n"
    if out:
        _write_atomic(out, payload)
    else:
        sys.stdout.write(payload)


def _cmd_bias_set(args) -> int:
    from nullcover.bias_sets import ParameterError, build_bias_complement, select_parameters

    rows = []
    ok = True
    for m0 in args.m0:
        try:
            params = select_parameters(args.eta, m0, args.d, cap=args.cap)
            comp = build_bias_complement(params, include_zero=args.include_zero,
                                         reinterpret=args.reinterpret, cap=args.cap)
        except ParameterError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 1
        cert = comp.certificate()
        rows.append(cert)
        ok = ok and cert["size_ok"] and cert["bias_ok"]
    data = rows[0] if len(rows) == 1 else {"schema": "nullcover/1", "kind": "bias_set_sweep", "rows": rows}
    _emit(data, args.out, args.format)
    return 0 if ok else 1


def _cmd_cover(args) -> int:
    from nullcover.covering import (
        CoverError,
        SetFamily,
        ThresholdError,
        dyadic_cover_complement,
        random_cover_complement,
    )

    with open(args.family) as fh:
        family = SetFamily.from_json_dict(json.load(fh))
    try:
        if family.kind == "grid":
            if args.N is not None and args.N != family.N:
                print(f"error: family has N = {family.N}, got --N {args.N}", file=sys.stderr)
                return 2
            B, cert = random_cover_complement(family, args.eps, seed=args.seed)
            data = {
                "schema": "nullcover/1",
                "kind": "cover",
                "certificate": cert.to_json_dict(),
                "complement": B.to_json_dict(),
            }
        else:
            res = dyadic_cover_complement(family, g=args.g, eps=args.eps, seed=args.seed)
            data = {
                "schema": "nullcover/1",
                "kind": "cover_dyadic",
                "certificate": res.certificate,
                "cells": res.cells.tolist(),
            }
    except ThresholdError as exc:
        print(f"certificate failure: {exc}", file=sys.stderr)
        return 1
    except CoverError as exc:
        print(f"certificate failure: {exc}", file=sys.stderr)
        return 1
    _emit(data, args.out, args.format)
    return 0


def _cmd_dimension(args) -> int:
    from nullcover.fractal import DyadicCubeSet, FractalError, generate_cantor, log_dimension_estimate

    try:
        if args.set:
            with open(args.set) as fh:
                cube = DyadicCubeSet.from_json_dict(json.load(fh))
        else:
            digits = [int(x) for x in args.digits.split(",")]
            cube = generate_cantor({"kind": "digits", "base": args.base, "digits": digits}, args.depth)
        est = log_dimension_estimate(cube, variant=args.variant)
    except FractalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    data = {"schema": "nullcover/1", "kind": "dimension", **est}
    _emit(data, args.out, args.format)
    return 0


def _cmd_rrp(args) -> int:
    from nullcover.engine import (
        AffineMap,
        EngineError,
        FunctionFamily,
        middle_thirds_points,
        rrp_run,
    )

    points = middle_thirds_points(args.cantor_depth, grid_exp=args.grid_exp)
    fam = FunctionFamily(
        maps=[AffineMap(Fraction(1, 2), Fraction(i, 1 << 20)) for i in range(args.maps)],
        bilipschitz_c=Fraction(2),
    )
    rho = [Fraction(1)] + [Fraction(1, 1 << (10 + j)) for j in range(args.depth - 1)]
    try:
        trace = rrp_run(points, fam, depth=args.depth, rho_schedule=rho,
                        piece_w_schedule=[12] * args.depth)
    except EngineError as exc:
        print(f"certificate failure: {exc}", file=sys.stderr)
        return 1
    _emit(trace.to_json_dict(), args.out, "json")
    return 0 if trace.passed else 1


def _cmd_full_measure(args) -> int:
    from nullcover.engine import EngineError, GridSet, full_measure_run

    grid = GridSet(spacing_exponent=args.spacing_exp, region=[(Fraction(0), Fraction(1, 2))])
    try:
        trace = full_measure_run(grid, args.eps, depth=args.depth)
    except EngineError as exc:
        print(f"certificate failure: {exc}", file=sys.stderr)
        return 1
    _emit(trace.to_json_dict(), args.out, "json")
    return 0 if trace.passed else 1


def _cmd_verify(args) -> int:
    from nullcover.engine import EngineError, verify_rrp_trace, verify_full_measure_trace

    with open(args.trace) as fh:
        data = json.load(fh)
    kind = data.get("kind")
    try:
        if kind == "rrp":
            result = verify_rrp_trace(data)
        elif kind == "full_measure":
            result = verify_full_measure_trace(data)
        else:
            print(f"error: unknown trace kind {kind!r}", file=sys.stderr)
            return 2
    except (EngineError, KeyError, ValueError) as exc:
        print(f"verification error: {exc}", file=sys.stderr)
        return 1
    _emit({"schema": "nullcover/1", "kind": f"verify_{kind}", **result}, args.out, "json")
    return 0 if result["passed"] else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="nullcover", description=__doc__,
                                formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("bias-set", help="Gauss-sum complement certificate")
    sp.add_argument("--eta", type=_rational, required=True)
    sp.add_argument("--m0", type=int, nargs="+", required=True)
    sp.add_argument("--d", type=int, default=1)
    sp.add_argument("--cap", type=int, default=1 << 24)
    sp.add_argument("--include-zero", action="store_true")
    sp.add_argument("--reinterpret", action="store_true")
    sp.add_argument("--out")
    sp.add_argument("--format", choices=("json", "csv"), default="json")
    sp.set_defaults(func=_cmd_bias_set)

    sp = sub.add_parser("cover", help="randomized covering complement")
    sp.add_argument("--family", required=True, help="SetFamily JSON file")
    sp.add_argument("--eps", type=_rational, required=True)
    sp.add_argument("--seed", type=int, required=True)
    sp.add_argument("--N", type=int)
    sp.add_argument("--g", type=int, default=6, help="dyadic scale exponent for cube families")
    sp.add_argument("--out")
    sp.add_argument("--format", choices=("json", "csv"), default="json")
    sp.set_defaults(func=_cmd_cover)

    sp = sub.add_parser("dimension", help="logarithmic dimension estimate")
    sp.add_argument("--set", help="DyadicCubeSet JSON file")
    sp.add_argument("--base", type=int, default=3)
    sp.add_argument("--digits", default="0,2")
    sp.add_argument("--depth", type=int, default=6)
    sp.add_argument("--variant", choices=("H", "P"), default="H")
    sp.add_argument("--out")
    sp.add_argument("--format", choices=("json", "csv"), default="json")
    sp.set_defaults(func=_cmd_dimension)

    sp = sub.add_parser("rrp", help="recursive-rectangles construction")
    sp.add_argument("--depth", type=int, default=3)
    sp.add_argument("--maps", type=int, default=8)
    sp.add_argument("--cantor-depth", type=int, default=7)
    sp.add_argument("--grid-exp", type=int, default=12)
    sp.add_argument("--out")
    sp.set_defaults(func=_cmd_rrp)

    sp = sub.add_parser("full-measure", help="full-measure cascade")
    sp.add_argument("--eps", type=_rational, default=Fraction(1, 2))
    sp.add_argument("--depth", type=int, default=3)
    sp.add_argument("--spacing-exp", type=int, default=50)
    sp.add_argument("--out")
    sp.set_defaults(func=_cmd_full_measure)

    sp = sub.add_parser("verify", help="re-validate a serialized trace")
    sp.add_argument("trace")
    sp.add_argument("--out")
    sp.set_defaults(func=_cmd_verify)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except json.JSONDecodeError as exc:
        print(f"error: invalid JSON input: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
