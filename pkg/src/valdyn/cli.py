"""Command-line front end.

One binary with subcommands; every analysis can emit either a short human
summary or exactly one JSON document (stable: sorted keys, so the output
round-trips byte for byte through json.loads/json.dumps).

Exit codes: 0 success, 2 parse error, 3 mathematical falsification,
4 resource limit, 1 anything else.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from .errors import (
    FalsificationError,
    InconsistencyError,
    ParseError,
    ResourceLimitError,
    ValdynError,
)
from .numbers import QN, QuadraticInteger
from .poly import PlaneMap, deg_sequence, mult_sequence, parse_map, parse_poly
from .skpval import (
    INFINITY,
    Valuation,
    affine_eval,
    parse_valuation,
    skp_eval,
    valuation_to_json,
)
from .cfquad import quadra_interval
from .dynlocal import eigenvaluation_search, jacobian_identity_check, verify_bounds
from .dynaffine import (
    AffineValuation,
    affine_eigenvaluation_search,
    affine_jacobian_check,
    skew_dichotomy,
    v1_certificate,
)


def _plain(obj):
    """Reduce report structures to JSON-native values."""
    if obj is None or isinstance(obj, (bool, int, str)):
        return obj
    if obj is INFINITY:
        return "inf"
    if isinstance(obj, float):
        return obj
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if hasattr(obj, "to_json"):
        return _plain(obj.to_json())
    return str(obj)


def _emit(doc, args, human_lines):
    if args.json:
        sys.stdout.write(json.dumps(_plain(doc), sort_keys=True))
        sys.stdout.write("\n")
    else:
        for line in human_lines:
            print(line)


def _affine_valuation(text: str) -> AffineValuation:
    nu = parse_valuation(text)
    if nu.kind == "negdeg":
        return AffineValuation.neg_deg()
    if nu.chart != "infinity":
        raise ParseError("affine analyses need a valuation centered at "
                         "infinity (-deg or an infinity-chart skp)")
    return AffineValuation.at_infinity(nu.skp)


def _cmd_local(args):
    f = parse_map(args.map, "local-germ")
    kwargs = {}
    if args.max_depth is not None:
        kwargs["max_depth"] = args.max_depth
    if args.test_degree is not None:
        kwargs["test_degree"] = args.test_degree
    report = eigenvaluation_search(f, **kwargs)
    doc = report.to_json()
    lines = [f"map: {f.render()}",
             f"eigenvaluation: {report.eigen.render()}",
             f"rate: {report.rate}" if report.rate else "rate: undetermined",
             f"normal form: {report.normal_form} ({report.type})"]
    if report.matrix:
        lines.append(f"matrix: {report.matrix}")
    if args.n:
        bounds = verify_bounds(f, report, args.n)
        doc["bounds"] = bounds
        lines.append(f"bounds verified for n <= {args.n} "
                     f"(delta = {bounds['delta']})")
    _emit(doc, args, lines)
    return 0


def _cmd_affine(args):
    F = parse_map(args.map, "affine")
    kwargs = {}
    if args.max_depth is not None:
        kwargs["max_depth"] = args.max_depth
    if args.test_degree is not None:
        kwargs["test_degree"] = args.test_degree
    report = affine_eigenvaluation_search(F, **kwargs)
    doc = report.to_json()
    lines = [f"map: {F.render()}",
             f"eigenvaluation: {report.eigen.render()}",
             f"dynamical degree: {report.rate}" if report.rate
             else "dynamical degree: undetermined",
             f"dichotomy: {report.dichotomy} ({report.type})"]
    if args.n:
        dich = skew_dichotomy(F, report, args.n)
        doc["dichotomy_report"] = dich
        lines.append(f"deg(F^n) for n <= {args.n}: {dich['degs']}")
    _emit(doc, args, lines)
    return 0


def _cmd_skp_eval(args):
    nu = parse_valuation(args.valuation)
    vars = ("x", "y") if nu.chart == "local" else ("X", "Y")
    P = parse_poly(args.poly, vars)
    if nu.chart == "infinity" or nu.kind == "negdeg":
        v = affine_eval(nu, P) if nu.kind != "negdeg" else QN.of(-P.degree())
    else:
        v = skp_eval(nu, P)
    doc = {"valuation": valuation_to_json(nu),
           "poly": P.render(vars),
           "value": "inf" if v is INFINITY else str(v)}
    _emit(doc, args, [f"value: {doc['value']}"])
    return 0


def _cmd_degseq(args):
    F = parse_map(args.map, "affine")
    degs = deg_sequence(F, args.n or 5)
    _emit({"map": F.render(), "degs": degs}, args,
          [",".join(str(d) for d in degs)])
    return 0


def _cmd_multseq(args):
    f = parse_map(args.map, "local-germ")
    mults = mult_sequence(f, args.n or 5)
    _emit({"map": f.render(), "mults": mults}, args,
          [",".join(str(c) for c in mults)])
    return 0


def _cmd_quadra(args):
    try:
        entries = [int(s) for s in args.matrix.split(",")]
    except ValueError as exc:
        raise ParseError(f"bad --matrix: {exc}")
    if len(entries) != 4:
        raise ParseError("--matrix needs four comma-separated integers")
    floor = args.floor if args.floor is not None else 1
    iv = quadra_interval(*entries, size_floor=floor)
    _emit(iv.to_json(), args, [str(iv)])
    return 0


def _cmd_certify_v1(args):
    nu = _affine_valuation(args.valuation)
    rep = v1_certificate(nu, sample_degree=args.test_degree or 6)
    _emit(rep, args, [f"status: {rep['status']}",
                      f"thinness: {rep['thinness']}"])
    return 0


def _cmd_jacobian_check(args):
    nu = parse_valuation(args.valuation)
    if nu.kind == "negdeg" or nu.chart == "infinity":
        F = parse_map(args.map, "affine")
        rep = affine_jacobian_check(F, _affine_valuation(args.valuation))
    else:
        f = parse_map(args.map, "local-germ")
        rep = jacobian_identity_check(f, nu)
    lines = ([f"identity holds: {rep['lhs']} = {rep['rhs']}"]
             if rep.get("checked") else [f"skipped: {rep.get('reason')}"])
    _emit(rep, args, lines)
    return 0


def _build_parser():
    ap = argparse.ArgumentParser(
        prog="valdyn",
        description="Exact attraction rates and dynamical degrees via "
                    "valuations")
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, func, **flags):
        p = sub.add_parser(name)
        if flags.get("map"):
            p.add_argument("--map", required=True)
        if flags.get("valuation"):
            p.add_argument("--valuation", required=True)
        if flags.get("poly"):
            p.add_argument("--poly", required=True)
        if flags.get("matrix"):
            p.add_argument("--matrix", required=True)
        p.add_argument("--n", type=int, default=None)
        p.add_argument("--max-depth", type=int, default=None)
        p.add_argument("--test-degree", type=int, default=None)
        p.add_argument("--floor", type=int, default=None)
        p.add_argument("--json", action="store_true")
        p.set_defaults(func=func)
        return p

    add("local", _cmd_local, map=True)
    add("affine", _cmd_affine, map=True)
    add("skp-eval", _cmd_skp_eval, valuation=True, poly=True)
    add("degseq", _cmd_degseq, map=True)
    add("multseq", _cmd_multseq, map=True)
    add("quadra", _cmd_quadra, matrix=True)
    add("certify-v1", _cmd_certify_v1, valuation=True)
    add("jacobian-check", _cmd_jacobian_check, map=True, valuation=True)
    return ap


def main(argv=None) -> int:
    ap = _build_parser()
    try:
        args = ap.parse_args(argv)
        return args.func(args)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return 2
    except (FalsificationError, InconsistencyError) as exc:
        print(f"falsification: {exc}", file=sys.stderr)
        return 3
    except ResourceLimitError as exc:
        print(f"resource limit: {exc}", file=sys.stderr)
        return 4
    except ValdynError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
