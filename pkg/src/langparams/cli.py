"""Command-line front end.

Exit codes: 0 on success, 1 on invalid input, 2 when a size guard refuses
the computation.  Reports go to --out or standard output.
"""

from __future__ import annotations

import argparse
import sys
from collections import Counter

from . import dualgroup, kostant, rootdata
from .dualgroup import ArithContext
from .errors import LangParamsError, SizeGuardError
from .exactalg import IntMatrix, IntPoly
from .fingrp import FqMatrix, GroupSpecFin, group_array, group_order_estimate, make_field
from .moduli import (
    GroupContext,
    SemidirectData,
    TameParameterPoint,
    TwistAut,
    cyclic_cohomology,
    enumerate_Z1,
    inertial_classes,
    relation_holds,
    stabilized_brute_force,
    tangent_report,
)
from .moduli.points import DEFAULT_PAIR_BOUND, l_jordan
from .serialize import emit_report, matrix_rows, parse_group, parse_int_matrix, points_report, poly_report


class CliError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CliError(message)


# ---------------------------------------------------------------------------
# shared helpers


def _context(args) -> ArithContext:
    if args.q is None:
        raise CliError("--q is required")
    return ArithContext.from_q(args.q, args.e, args.f, args.p)


def _lgroup(args) -> dualgroup.LGroupSpec:
    if not args.type:
        raise CliError("--type is required")
    return dualgroup.lgroup_from_label(args.type, _context(args), args.f)


def _semidirect(args, spec: GroupSpecFin) -> SemidirectData:
    if args.q is None:
        raise CliError("--q is required")
    twist = args.twist or "none"
    if twist not in ("none", "fr", "s", "both"):
        raise CliError("--twist must be one of none, fr, s, both for matrix groups")
    outer = TwistAut(None, True)
    fr = outer if twist in ("fr", "both") else TwistAut()
    s = outer if twist in ("s", "both") else TwistAut()
    return SemidirectData(fr, s, args.q)


def _dual_chi(spec: GroupSpecFin, sd: SemidirectData) -> IntPoly:
    """chi of the group with the Frobenius twist, as used by the point bounds."""
    twisted = sd.theta_fr.inv_transpose
    if spec.kind == "T":
        return (IntPoly.T() + (1 if twisted else -1)) ** spec.n
    label = f"{spec.kind}{spec.n}" + ("^2" if twisted else "")
    d, b = rootdata.parse_type(label)
    return rootdata.chi_twisted(d, b)


def _point_context(args, sd: SemidirectData) -> ArithContext:
    e = 2 if sd.theta_s.inv_transpose else 1
    f = 2 if sd.theta_fr.inv_transpose else 1
    return ArithContext.from_q(args.q, e, f, args.p)


def _group(args) -> GroupSpecFin:
    if not args.group or args.ell is None:
        raise CliError("--group and --ell are required")
    return parse_group(args.group, args.ell, args.k)


def _points(args):
    spec = _group(args)
    sd = _semidirect(args, spec)
    pts = enumerate_Z1(spec, sd, args.max_pairs, args.workers)
    return spec, sd, pts


# ---------------------------------------------------------------------------
# commands


def cmd_chi(args) -> dict:
    if not args.type:
        raise CliError("--type is required")
    d, beta = rootdata.parse_type(args.type)
    chi = rootdata.chi_twisted(d, beta, method=args.method)
    if args.f > 1:
        chi = chi.substitute_power(args.f)
    out = {"type": args.type, "f": str(args.f), "chi": poly_report(chi), "h": str(rootdata.twisted_coxeter(chi))}
    if rootdata.has_triality(d, beta):
        out["chi_prime"] = poly_report(rootdata.chi_prime(d, beta).substitute_power(args.f))
    return out


def cmd_chi_star(args) -> dict:
    if not args.type:
        raise CliError("--type is required")
    d, beta = rootdata.parse_type(args.type)
    chi = rootdata.chi_twisted(d, beta)
    if args.f > 1:
        chi = chi.substitute_power(args.f)
    h = rootdata.twisted_coxeter(chi)
    out = {"type": args.type, "h": str(h), "chi_star": poly_report(rootdata.chi_star_from_h(h))}
    if args.q is not None:
        out["chi_star_at_q"] = str(rootdata.chi_star_from_h(h)(args.q))
    return out


def cmd_banal(args) -> dict:
    spec = _lgroup(args)
    out = dualgroup.banal_report(spec).to_json()
    out["context"] = spec.context.to_json()
    out["type"] = args.type
    return out


def cmd_compare_banal(args) -> dict:
    spec = _lgroup(args)
    rows = dualgroup.compare_banal(spec, args.bound)
    return {"type": args.type, "context": spec.context.to_json(), "bound": str(args.bound),
            "rows": [{"ell": str(ell), "lg_excluded": a, "g_nonbanal": b, "agree": a == b} for ell, a, b in rows],
            "all_agree": all(a == b for _, a, b in rows)}


def cmd_count_points(args) -> dict:
    if args.group:
        spec = _group(args)
        out = {"group": spec.label(), "formula": str(group_order_estimate(spec))}
        if not args.no_enumerate:
            out["enumerated"] = str(len(group_array(spec)))
            out["match"] = out["enumerated"] == out["formula"]
        return out
    spec = _lgroup(args)
    return {"type": args.type, "context": spec.context.to_json(),
            "formula": str(dualgroup.chevalley_steinberg(spec, args.q))}


def cmd_enumerate(args) -> dict:
    spec, sd, pts = _points(args)
    ctx = _point_context(args, sd)
    report = points_report(pts, spec, sd, ctx, _dual_chi(spec, sd))
    if pts:
        report["count"] = str(len(pts))
    return report


def _single_point(args, spec, sd) -> TameParameterPoint:
    F = spec.field
    F0 = FqMatrix.from_ints(parse_int_matrix(args.F0), F)
    sigma0 = FqMatrix.from_ints(parse_int_matrix(args.sigma0), F)
    if not (spec.contains(F0) and spec.contains(sigma0)):
        raise CliError("F0 and sigma0 must lie in the group")
    if not relation_holds(F0, sigma0, sd):
        raise CliError("the pair does not satisfy the defining relation")
    sd.require(GroupContext(spec))
    ss, u, _ = l_jordan(sigma0, sd.theta_s, sd.order_s)
    return TameParameterPoint(F0, sigma0, spec, sd, ss, u)


def cmd_tangent(args) -> dict:
    spec = _group(args)
    sd = _semidirect(args, spec)
    if args.F0 or args.sigma0:
        if not (args.F0 and args.sigma0):
            raise CliError("give both --F0 and --sigma0")
        pt = _single_point(args, spec, sd)
        t = tangent_report(pt)
        out = t.to_json()
        out.update({"F0": matrix_rows(pt.F0), "sigma0": matrix_rows(pt.sigma0)})
        return out
    pts = enumerate_Z1(spec, sd, args.max_pairs, args.workers)
    reports = [tangent_report(p) for p in pts]
    hist = Counter((r.dim_tangent, r.dim_h0_twist, r.unobstructed, r.equality) for r in reports)
    return {"group": spec.label(), "q": str(args.q), "points": str(len(pts)),
            "equality_everywhere": all(r.equality for r in reports),
            "unobstructed_points": str(sum(r.unobstructed for r in reports)),
            "histogram": [{"dim": str(d), "h0": str(h), "unobstructed": u, "equality": e, "count": str(c)}
                          for (d, h, u, e), c in sorted(hist.items())]}


def cmd_torus_cocycles(args) -> dict:
    if not args.afr or not args.as_:
        raise CliError("--afr and --as are required")
    if args.q is None:
        raise CliError("--q is required")
    a_fr = IntMatrix.from_rows(parse_int_matrix(args.afr))
    a_s = IntMatrix.from_rows(parse_int_matrix(args.as_))
    free, torsion = dualgroup.torus_cocycle_group(a_fr, a_s, args.q)
    out = {"free_rank": str(free), "torsion": [str(t) for t in torsion], "q": str(args.q)}
    if args.ell is not None:
        out["count"] = str(dualgroup.torus_cocycle_count(free, torsion, args.ell, args.k))
    return out


def cmd_components(args) -> dict:
    spec, sd, pts = _points(args)
    classes = inertial_classes(pts, spec)
    return {"group": spec.label(), "q": str(args.q), "approximation": True, "points": str(len(pts)),
            "classes": [{"representative": matrix_rows(c.representative), "k": str(c.k),
                         "beta_label": c.beta_label, "count": str(c.count)} for c in classes]}


def cmd_kostant(args) -> dict:
    if not args.type:
        raise CliError("--type is required (sl2..sl5, gl2..gl5, sp4)")
    frame = kostant.principal_triple(args.type)
    twist = args.twist or "none"
    if twist not in ("none", "outer"):
        raise CliError("--twist must be none or outer for kostant")
    beta = kostant.outer_automorphism(frame) if twist == "outer" else None
    out = kostant.kostant_determinant(frame, beta, args.t).to_json()
    out["weights"] = [str(w) for w in frame.weights]
    if args.ell is not None:
        if args.q is None:
            raise CliError("--q is required with --ell")
        out["regular_unipotent_unobstructed"] = kostant.regular_unipotent_check(
            frame, make_field(args.ell, args.k), args.q, beta)
    return out


def cmd_cohomology(args) -> dict:
    if args.q is None or args.p is None:
        raise CliError("--q and --p are required")
    inv = [int(x) for x in args.A.split(",") if x.strip()] if args.A else []
    sigma = _action(args.sigma)
    fr = _action(args.fr)
    res = cyclic_cohomology(inv, sigma, fr, args.q, args.M, args.p)
    out = {"A": [str(x) for x in inv], "M": str(args.M), "q": str(args.q), "p": str(args.p)}
    out.update(res.to_json())
    if args.brute:
        stable, _ = stabilized_brute_force(inv, sigma, fr, args.q, args.M, args.p)
        out["brute_force"] = stable.to_json()
        out["match"] = stable == res
    return out


def _action(text: str):
    if ";" in text or "," in text:
        return parse_int_matrix(text)
    return int(text)


COMMANDS = {
    "chi": cmd_chi,
    "chi-star": cmd_chi_star,
    "banal": cmd_banal,
    "compare-banal": cmd_compare_banal,
    "count-points": cmd_count_points,
    "enumerate": cmd_enumerate,
    "tangent": cmd_tangent,
    "torus-cocycles": cmd_torus_cocycles,
    "components": cmd_components,
    "kostant": cmd_kostant,
    "cohomology": cmd_cohomology,
}


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="langparams", description="Invariants of tame Langlands parameter moduli.")
    ap.add_argument("command", choices=sorted(COMMANDS))
    ap.add_argument("--type", help="root datum label, e.g. GL3, SO8^3, A2xG2; kostant: sl3, sp4")
    ap.add_argument("--q", type=int)
    ap.add_argument("--p", type=int)
    ap.add_argument("--e", type=int, default=1)
    ap.add_argument("--f", type=int, default=1)
    ap.add_argument("--ell", type=int)
    ap.add_argument("--k", type=int, default=1)
    ap.add_argument("--group", help="finite matrix group, e.g. GL2, SL2, Sp4, T2, U3")
    ap.add_argument("--twist", help="none|fr|s|both for matrix groups; none|outer for kostant")
    ap.add_argument("--out")
    ap.add_argument("--format", choices=["json", "csv"], default="json")
    ap.add_argument("--max-pairs", type=int, default=DEFAULT_PAIR_BOUND)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--method", choices=["auto", "oracle", "table"], default="auto")
    ap.add_argument("--bound", type=int, default=100)
    ap.add_argument("--no-enumerate", action="store_true")
    ap.add_argument("--F0", help="matrix 'a,b;c,d' (tangent at one point)")
    ap.add_argument("--sigma0", help="matrix 'a,b;c,d' (tangent at one point)")
    ap.add_argument("--afr", help="Frobenius action on characters, 'a,b;c,d'")
    ap.add_argument("--as", dest="as_", help="inertia action on characters, 'a,b;c,d'")
    ap.add_argument("--t", default="2", help="kostant parameter (rational)")
    ap.add_argument("--A", help="invariant factors, comma separated")
    ap.add_argument("--sigma", default="1", help="inertia action: scalar or matrix")
    ap.add_argument("--fr", default="1", help="Frobenius action: scalar or matrix")
    ap.add_argument("--M", type=int, default=1, help="order of the inertia action")
    ap.add_argument("--brute", action="store_true", help="also run the brute-force cohomology")
    return ap


def run(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if args.ell is not None and args.p is not None and args.ell == args.p:
            raise CliError("ell must differ from p")
        if args.ell is not None and args.q is not None and args.q > 1 and args.q % args.ell == 0:
            raise CliError("ell must differ from the residue characteristic of q")
        report = COMMANDS[args.command](args)
        text = emit_report(report, args.format)
    except SizeGuardError as exc:
        print(f"langparams: refused: {exc}", file=sys.stderr)
        return 2
    except (CliError, LangParamsError, ValueError, ArithmeticError) as exc:
        print(f"langparams: error: {exc}", file=sys.stderr)
        return 1
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
