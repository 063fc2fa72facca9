"""Command-line front end: spec-file parsing and tabular/JSON reporting.

Exit status: 0 on success, 1 when a requested check finds a violation (or an
audit comes back inconclusive), 2 on malformed input.
"""
from __future__ import annotations

import argparse
import json
import re
import sys
from fractions import Fraction

from .audit import audit_all, nondegenerate_audit, rational_audit
from .equidist import vertex_hits
from .exactnum import ExactScalar, format_scalar, parse_scalar
from .homology import betti_table, epsilon_term
from .iteration import GeodesicSpec, analytical_period, index_table, mean_index
from .morse import (
    GeodesicModel,
    KAssignment,
    identity_residual,
    kassignment_violations,
    morse_check,
    morse_numbers,
)
from .normalforms import decomposition_from_json, decomposition_to_json
from .quasimono import certificate, verify_certificate
from .samples import DEFAULT_SAMPLES


class InputError(Exception):
    pass


def _fail(where: str, why: str) -> "InputError":
    return InputError(f"{where}: {why}")


# -- spec files -----------------------------------------------------------------


def obj_to_spec(obj: dict, where: str = "<spec>") -> GeodesicSpec:
    try:
        man = obj["manifold"]
        d, h = int(man["d"]), int(man["h"])
        i1 = int(obj["initial_index"])
        blocks = obj["blocks"]
    except (KeyError, TypeError) as exc:
        raise _fail(where, f"missing or malformed field ({exc})") from exc
    try:
        dec = decomposition_from_json(blocks)
    except ValueError as exc:
        raise _fail(f"{where}.blocks", str(exc)) from exc
    try:
        return GeodesicSpec(dec, d * h, i1)
    except ValueError as exc:
        raise _fail(where, str(exc)) from exc


def obj_to_model(obj: dict, where: str = "<spec>") -> GeodesicModel:
    spec = obj_to_spec(obj, where)
    if "kvectors" not in obj:
        raise _fail(where, "model needs a 'kvectors' list (one vector per power)")
    kvecs = tuple(tuple(int(x) for x in v) for v in obj["kvectors"])
    _, n = analytical_period(spec)
    if len(kvecs) != n:
        raise _fail(where, f"kvectors must list {n} vectors (the analytical period)")
    from .iteration import index as _index

    eps = tuple(1 if (_index(spec, m) - spec.i1) % 2 == 0 else -1 for m in range(1, n + 1))
    ka = KAssignment(period=n, epsilons=eps, kvecs=kvecs)
    problems = kassignment_violations(spec, ka)
    if problems:
        raise _fail(f"{where}.kvectors", "; ".join(problems))
    return GeodesicModel(spec, ka)


def spec_to_obj(spec: GeodesicSpec, model: GeodesicModel | None = None) -> dict:
    counts_dim = spec.manifold_dim
    # the manifold type is not recoverable from the spec alone; callers that
    # need (d, h) carry it separately.  Emit hd with h=1 by convention.
    obj = {
        "manifold": {"d": counts_dim, "h": 1},
        "initial_index": spec.i1,
        "blocks": decomposition_to_json(spec.dec),
    }
    if model is not None:
        obj["kvectors"] = [list(v) for v in model.kassign.kvecs]
    return obj


def _load_json(path: str):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise _fail(path, f"cannot read ({exc})") from exc
    except json.JSONDecodeError as exc:
        raise _fail(f"{path}:{exc.lineno}:{exc.colno}", exc.msg) from exc


def _load_spec(path: str) -> GeodesicSpec:
    return obj_to_spec(_load_json(path), path)


def _load_models(path: str) -> tuple[list[GeodesicModel], int, int, bool]:
    data = _load_json(path)
    if isinstance(data, dict):
        data = [data]
    if not isinstance(data, list) or not data:
        raise _fail(path, "expected a model object or a non-empty list of them")
    models = [obj_to_model(obj, f"{path}[{i}]") for i, obj in enumerate(data)]
    dh = {(int(o["manifold"]["d"]), int(o["manifold"]["h"])) for o in data}
    if len(dh) != 1:
        raise _fail(path, "all models must share one manifold type")
    (d, h), = dh
    reversible = any(bool(o.get("reversible", False)) for o in data)
    return models, d, h, reversible


_FRACTION_RE = re.compile(r"^-?\d+(?:/\d+)?$")


def _parse_fraction(text: str, where: str) -> Fraction:
    # p/q text only; decimal input is rejected so everything stays exact
    if not _FRACTION_RE.match(text.strip()):
        raise _fail(where, f"expected a rational like 1/8, got {text!r}")
    try:
        return Fraction(text)
    except ZeroDivisionError as exc:
        raise _fail(where, f"zero denominator in {text!r}") from exc


# -- subcommands ----------------------------------------------------------------


def _cmd_iterate(args) -> int:
    spec = _load_spec(args.spec)
    table = index_table(spec, args.mmax)
    if args.format == "json":
        print(json.dumps([{"m": m, "index": i, "nullity": nu} for m, i, nu in table.entries]))
    else:
        print("# m\tindex\tnullity")
        for m, i, nu in table.entries:
            print(f"{m}\t{i}\t{nu}")
    return 0


def _cmd_betti(args) -> int:
    t = betti_table(args.d, args.h, args.qmax)
    rows = []
    total = 0
    for q in range(args.qmax + 1):
        total += t[q]
        row = {"q": q, "b": t[q]}
        if args.sums:
            row["sum"] = total
            if args.d % 2 == 0 and q >= args.h * args.d - 1 and args.h >= 1:
                row["defect"] = str(epsilon_term(args.d, args.h, q))
        rows.append(row)
    if args.format == "json":
        print(json.dumps(rows))
    else:
        cols = list(rows[0].keys())
        print("# " + "\t".join(cols))
        for row in rows:
            print("\t".join(str(row.get(c, "")) for c in cols))
    return 0


def _cmd_period(args) -> int:
    spec = _load_spec(args.spec)
    n0, n = analytical_period(spec)
    if args.format == "json":
        print(json.dumps({"n0": n0, "n": n}))
    else:
        print("# n0\tn")
        print(f"{n0}\t{n}")
    return 0


def _cmd_meanindex(args) -> int:
    spec = _load_spec(args.spec)
    value = mean_index(spec)
    if args.format == "json":
        print(json.dumps({"mean_index": format_scalar(value)}))
    else:
        print(format_scalar(value))
    return 0


def _cmd_quasimono(args) -> int:
    spec = _load_spec(args.spec)
    eps = _parse_fraction(args.eps, "--eps")
    cert = certificate(spec, eps, m_max=args.mmax)
    if cert is None:
        print(json.dumps({"certificate": None, "note": "no separating power within bound"}))
        return 1
    check_to = args.checkto if args.checkto else 10 * cert.T
    report = verify_certificate(spec, cert, check_to)
    out = {
        "certificate": {
            "pattern": list(cert.pattern),
            "A": cert.A,
            "T": cert.T,
            "K1": cert.K1,
            "K2": cert.K2,
            "epsilon": str(cert.epsilon),
            "epsilon_used": str(cert.eps_used),
            "m1": cert.m1,
            "alpha": format_scalar(cert.alpha),
            "beta": format_scalar(cert.beta) if cert.beta is not None else None,
        },
        "verification": {
            "checked_below": report.checked_below,
            "checked_above": report.checked_above,
            "ok": report.ok,
            "violations": [list(v) for v in report.violations],
        },
    }
    print(json.dumps(out))
    return 0 if report.ok else 1


def _cmd_vertices(args) -> int:
    try:
        sigmas = [parse_scalar(s) for s in args.sigma]
    except ValueError as exc:
        raise _fail("--sigma", str(exc)) from exc
    eps = _parse_fraction(args.eps, "--eps")
    hits = vertex_hits(sigmas, eps, args.mmax, step=args.step)
    rows = [
        {"pattern": "".join(map(str, chi)), "witnesses": ms[: args.limit]}
        for chi, ms in sorted(hits.items())
    ]
    if args.format == "json":
        print(json.dumps(rows))
    else:
        print("# pattern\twitnesses")
        for row in rows:
            print(row["pattern"] + "\t" + "\t".join(map(str, row["witnesses"])))
    return 0


def _cmd_morse(args) -> int:
    models, d, h, file_reversible = _load_models(args.models)
    reversible = args.reversible or file_reversible
    M = morse_numbers(models, args.qmax, reversible=reversible)
    b = betti_table(d, h, args.qmax)
    report = morse_check(M, b, args.qmax)
    if args.format == "json":
        print(
            json.dumps(
                {
                    "M": list(M.values),
                    "b": list(b.values),
                    "weak_ok": report.weak_ok,
                    "strong_ok": report.strong_ok,
                    "lacunary_applicable": report.lacunary_applicable,
                    "lacunary_ok": report.lacunary_ok,
                    "first_violation": list(report.first_violation)
                    if report.first_violation
                    else None,
                }
            )
        )
    else:
        print("# q\tM\tb")
        for q in range(args.qmax + 1):
            print(f"{q}\t{M[q]}\t{b[q]}")
        print(f"# weak: {'ok' if report.weak_ok else 'violated'}")
        print(f"# strong: {'ok' if report.strong_ok else 'violated'}")
        lac = "n/a" if not report.lacunary_applicable else ("ok" if report.lacunary_ok else "violated")
        print(f"# lacunary: {lac}")
        if report.first_violation:
            kind, q, lhs, rhs = report.first_violation
            print(f"# first violation: {kind} at q={q} ({lhs} vs {rhs})")
    return 0 if report.ok else 1


def _cmd_identity(args) -> int:
    models, d, h, file_reversible = _load_models(args.models)
    reversible = args.reversible or file_reversible
    residual = identity_residual(models, d, h, reversible=reversible)
    if args.format == "json":
        print(json.dumps({"residual": format_scalar(residual), "zero": residual.is_zero()}))
    else:
        print(format_scalar(residual))
    return 0 if residual.is_zero() else 1


def _load_samples(path: str | None) -> tuple[ExactScalar, ...]:
    if path is None:
        return DEFAULT_SAMPLES
    data = _load_json(path)
    if not isinstance(data, list):
        raise _fail(path, "expected a JSON list of scalar texts")
    try:
        return tuple(parse_scalar(s) for s in data)
    except ValueError as exc:
        raise _fail(path, str(exc)) from exc


def _cmd_audit(args) -> int:
    if args.what == "dim4":
        summary = audit_all(args.reversible, _load_samples(args.samples), m_max=args.mmax)
        rows = []
        for v in summary.verdicts:
            rows.append(
                {
                    "case": v.case.case_id,
                    "sample": format_scalar(v.case.sigma_sample),
                    "outcome": v.outcome,
                    "route": v.witness.route if v.witness else None,
                    "witness": v.witness.detail if v.witness else None,
                }
            )
        if args.format == "json":
            print(json.dumps({"cases": rows, "all_contradiction": summary.all_contradiction}))
        else:
            print("# case\tsample\toutcome\troute")
            for row in rows:
                print(f"{row['case']}\t{row['sample']}\t{row['outcome']}\t{row['route']}")
            verdict = "Contradiction" if summary.all_contradiction else "Inconclusive"
            print(f"all cases: {verdict}")
        return 0 if summary.all_contradiction else 1
    if args.what == "rational":
        rep = rational_audit(args.d, args.h)
        out = {
            "d": rep.d,
            "h": rep.h,
            "checked": rep.checked,
            "max_defect": str(rep.max_defect),
            "bound": str(rep.bound),
            "ok": rep.ok,
        }
        print(json.dumps(out) if args.format == "json" else "\n".join(f"{k}: {v}" for k, v in out.items()))
        return 0 if rep.ok else 1
    if args.what == "nondeg":
        rep = nondegenerate_audit(
            args.d, args.h, _load_samples(args.samples), reversible=args.reversible, m_max=args.mmax
        )
        rows = [
            {
                "rotations": b.rotations,
                "status": b.status,
                "route": b.witness.route if b.witness else None,
                "witness": b.witness.detail if b.witness else None,
            }
            for b in rep.branches
        ]
        if args.format == "json":
            print(json.dumps({"branches": rows, "all_contradiction": rep.all_contradiction}))
        else:
            print("# rotations\tstatus\troute")
            for row in rows:
                print(f"{row['rotations']}\t{row['status']}\t{row['route']}")
            print(f"all branches: {'Contradiction' if rep.all_contradiction else 'Inconclusive'}")
        return 0 if rep.all_contradiction else 1
    raise _fail("audit", f"unknown audit {args.what!r}")


def _build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="geomorse", description=__doc__)
    sub = top.add_subparsers(dest="command", required=True)

    def add_format(p):
        p.add_argument("--format", choices=("tsv", "json"), default="tsv")

    p = sub.add_parser("iterate", help="index/nullity table for iterated powers")
    p.add_argument("--spec", required=True)
    p.add_argument("--mmax", type=int, required=True)
    add_format(p)
    p.set_defaults(func=_cmd_iterate)

    p = sub.add_parser("betti", help="loop-space Betti numbers")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--h", type=int, required=True)
    p.add_argument("--qmax", type=int, required=True)
    p.add_argument("--sums", action="store_true")
    add_format(p)
    p.set_defaults(func=_cmd_betti)

    p = sub.add_parser("period", help="analytical period of a spec")
    p.add_argument("--spec", required=True)
    add_format(p)
    p.set_defaults(func=_cmd_period)

    p = sub.add_parser("meanindex", help="exact mean index of a spec")
    p.add_argument("--spec", required=True)
    add_format(p)
    p.set_defaults(func=_cmd_meanindex)

    p = sub.add_parser("quasimono", help="separating-power certificate search")
    p.add_argument("--spec", required=True)
    p.add_argument("--eps", default="1/8")
    p.add_argument("--mmax", type=int, default=10**6)
    p.add_argument("--checkto", type=int, default=0)
    p.set_defaults(func=_cmd_quasimono)

    p = sub.add_parser("vertices", help="corner hits of fractional-part orbits")
    p.add_argument("--sigma", action="append", required=True)
    p.add_argument("--eps", default="1/8")
    p.add_argument("--mmax", type=int, required=True)
    p.add_argument("--step", type=int, default=1)
    p.add_argument("--limit", type=int, default=5)
    add_format(p)
    p.set_defaults(func=_cmd_vertices)

    p = sub.add_parser("morse", help="Morse-type numbers against Betti numbers")
    p.add_argument("--models", required=True)
    p.add_argument("--qmax", type=int, required=True)
    p.add_argument("--reversible", action="store_true")
    add_format(p)
    p.set_defaults(func=_cmd_morse)

    p = sub.add_parser("identity", help="mean index identity residual")
    p.add_argument("--models", required=True)
    p.add_argument("--reversible", action="store_true")
    add_format(p)
    p.set_defaults(func=_cmd_identity)

    p = sub.add_parser("audit", help="desk-scale case audits")
    p.add_argument("what", choices=("dim4", "rational", "nondeg"))
    p.add_argument("--reversible", action="store_true")
    p.add_argument("--samples")
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--h", type=int, default=2)
    p.add_argument("--mmax", type=int, default=10**6)
    add_format(p)
    p.set_defaults(func=_cmd_audit)

    return top


def run(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
