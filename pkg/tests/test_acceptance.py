"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line."""

import hashlib
import json
import math
import time
from collections import Counter
from importlib import resources

import numpy as np

from langparams.cli import run
from langparams.dualgroup import (
    ArithContext,
    LGroupSpec,
    banal_report,
    chevalley_steinberg,
    chi_global,
    coxeter_untwisted,
    lgroup_from_label,
    primes_up_to,
    torus_cocycle_count,
    torus_cocycle_group,
)
from langparams.exactalg import IntMatrix, IntPoly, eval_mod, prime_divisors
from langparams.fingrp import FqMatrix, GroupSpecFin, enumerate_group, is_unipotent, make_field
from langparams.kostant import kostant_determinant, outer_automorphism, principal_triple
from langparams.moduli import (
    GroupContext,
    SemidirectData,
    TwistAut,
    check_point_bounds,
    cyclic_cohomology,
    enumerate_Z1,
    h1_finite,
    inertial_classes,
    lie_algebra,
    relation_holds,
    stabilized_brute_force,
    tangent_report,
    torsor_report,
)
from langparams.moduli.points import TameParameterPoint, l_jordan
from langparams.rootdata import chi_oracle, chi_prime, chi_table, chi_twisted, parse_type, twisted_coxeter

T = IntPoly.T()


def prod(polys):
    out = IntPoly.const(1)
    for p in polys:
        out = out * p
    return out


# ---------------------------------------------------------------------------
# 1. closed-form chi tables


def test_criterion_01_closed_form_chi(criterion):
    with criterion(1, "closed-form chi tables (GL, twisted GL, Sp/SO odd, SO even, triality)"):
        start = time.perf_counter()
        for n in range(1, 6):
            assert chi_twisted(*parse_type(f"GL{n}")) == prod(T ** d - 1 for d in range(1, n + 1))
        for n in range(1, 5):
            expected = prod(T ** d - (-1) ** d for d in range(1, n + 1))
            assert chi_twisted(*parse_type(f"GL{n}^2")) == expected
        for n in range(1, 5):
            expected = prod(T ** (2 * d) - 1 for d in range(1, n + 1))
            assert chi_twisted(*parse_type(f"Sp{2 * n}")) == expected
            assert chi_twisted(*parse_type(f"SO{2 * n + 1}")) == expected
        for n in range(1, 5):
            for f in (1, 2):
                label = f"SO{2 * n}" + ("^2" if f == 2 else "")
                expected = (T ** n + (-1) ** f) * prod(T ** (2 * d) - 1 for d in range(1, n))
                assert chi_twisted(*parse_type(label)) == expected, label
        d, beta = parse_type("SO8^3")
        chi = chi_twisted(d, beta)
        assert chi == (T ** 2 - 1) * (T ** 6 - 1) * (T ** 8 + T ** 4 + 1)
        assert twisted_coxeter(chi) == 12
        assert chi_prime(d, beta) == T ** 12 - 1
        assert time.perf_counter() - start < 10


# ---------------------------------------------------------------------------
# 2. oracle and table agree


UNTWISTED_RANK_LE_4 = ["A1", "A2", "A3", "A4", "B2", "B3", "B4", "C2", "C3", "C4", "D4", "G2", "F4", "E6"]


def test_criterion_02_oracle_table(criterion):
    with criterion(2, "Springer-lcm chi equals degree-table chi (rank <= 4, G2, F4, E6)"):
        start = time.perf_counter()
        for label in UNTWISTED_RANK_LE_4:
            d, beta = parse_type(label)
            oracle = chi_oracle(d, beta)
            table = chi_table(d, beta)
            assert oracle.to_json() == table.to_json(), label
        assert time.perf_counter() - start < 60


# ---------------------------------------------------------------------------
# 3. point counts


def test_criterion_03_point_counts(criterion):
    with criterion(3, "Chevalley-Steinberg equals exhaustive enumeration"):
        start = time.perf_counter()
        cases = [("GL", 2, q, "GL2") for q in (2, 3, 4, 5)]
        cases += [("SL", 2, q, "A1") for q in (2, 3, 5)]
        cases += [("GL", 3, 2, "GL3"), ("Sp", 4, 2, "Sp4")]
        for kind, n, q, label in cases:
            ell = prime_divisors(q)[0]
            k = round(math.log(q, ell))
            G = enumerate_group(GroupSpecFin(kind, n, make_field(ell, k)))
            assert len(G) == chevalley_steinberg(lgroup_from_label(label, ArithContext.from_q(q))), (kind, n, q)
        assert chevalley_steinberg(lgroup_from_label("Sp4", ArithContext.from_q(2))) == 720
        # U3(F2) lives in GL3(F4)
        U = enumerate_group(GroupSpecFin("U", 3, make_field(2, 2)))
        assert len(U) == chevalley_steinberg(lgroup_from_label("GL3^2", ArithContext.from_q(2))) == 648
        assert time.perf_counter() - start < 120


# ---------------------------------------------------------------------------
# 4. moduli property suite


def test_criterion_04_moduli_properties(criterion):
    with criterion(4, "moduli properties: relation, Jordan bound, unipotence, torsors, tangent equality"):
        start = time.perf_counter()
        for n in (1, 2):
            for ell in (3, 5, 7):
                spec = GroupSpecFin("GL", n, make_field(ell))
                dim_g = lie_algebra(spec).dim
                weyl = math.factorial(n)
                chi = prod(T ** d - 1 for d in range(1, n + 1))
                for q in (2, 3, 4):
                    if q % ell == 0:
                        continue
                    ctx = ArithContext.from_q(q)
                    sd = SemidirectData.trivial(q)
                    pts = enumerate_Z1(spec, sd)
                    assert pts
                    jordan_bound = q ** weyl - 1
                    unip_exp = q ** math.factorial(n) - 1
                    for p in pts:
                        # (a) defining relation
                        assert relation_holds(p.F0, p.sigma0, sd)
                        # (b) Jordan bound with prime-to-ell order
                        b = check_point_bounds(p, ctx, chi)
                        assert b.jordan_ok and b.unipotent_ok
                        ss_order = b.ss_order
                        assert ss_order % ell != 0 and jordan_bound % ss_order == 0
                        # (c) sigma^(q^(n!) - 1) is unipotent
                        assert is_unipotent(p.sigma0 ** unip_exp)
                        # (e) tangent equality
                        t = tangent_report(p)
                        assert t.dim_tangent == dim_g + t.dim_h0_twist
                    # (d) every fiber is a torsor under the centraliser
                    by_sigma: dict = {}
                    for p in pts:
                        by_sigma.setdefault(p.sigma0, []).append(p)
                    for xi, fiber in by_sigma.items():
                        report = torsor_report(fiber, xi)
                        assert report["ok"], (n, ell, q, report)
        assert time.perf_counter() - start < 300


# ---------------------------------------------------------------------------
# 5. torus unobstructedness


def torus_actions(r, F):
    swap = FqMatrix.from_rows([[0, 1], [1, 0]], F)
    out = [("trivial", TwistAut(), IntMatrix.identity(r)),
           ("inversion", TwistAut(None, True), IntMatrix.identity(r).scale(-1))]
    if r == 2:
        out.append(("swap", TwistAut(swap, False), IntMatrix.from_rows([[0, 1], [1, 0]])))
    return out


def torus_point(spec, sd):
    ident = FqMatrix.identity(spec.n, spec.field)
    ss, u, _ = l_jordan(ident, sd.theta_s, sd.order_s)
    return TameParameterPoint(ident, ident, spec, sd, ss, u)


def test_criterion_05_torus_unobstructedness(criterion):
    with criterion(5, "torus: eigenvalue criterion iff chi(q) != 0 mod ell"):
        checked = 0
        for ell in primes_up_to(50):
            F = make_field(ell)
            for r in (1, 2):
                spec = GroupSpecFin("T", r, F)
                for name, theta, beta in torus_actions(r, F):
                    for q in (2, 3, 5, 9):
                        if q % ell == 0:
                            continue
                        sd = SemidirectData(theta, TwistAut(), q)
                        sd.require(GroupContext(spec))
                        chi = chi_global(LGroupSpec((), r, beta, ArithContext.from_q(q)))
                        expected = eval_mod(chi, q, ell) != 0
                        # Ad is trivial on the torus, so one point decides the criterion
                        assert tangent_report(torus_point(spec, sd)).unobstructed == expected, (ell, r, name, q)
                        if ell <= 13:
                            for p in enumerate_Z1(spec, sd):
                                assert tangent_report(p).unobstructed == expected
                        checked += 1
        assert checked > 0


# ---------------------------------------------------------------------------
# 6. Kostant identity


KOSTANT_LABELS = {"sl2": "A1", "sl3": "A2", "sl4": "A3", "sp4": "C2"}


def test_criterion_06_kostant(criterion):
    with criterion(6, "Kostant determinant equals +-chi(t^2) with constant sign"):
        start = time.perf_counter()
        for algebra, label in KOSTANT_LABELS.items():
            frame = principal_triple(algebra)
            betas = [(None, label)]
            if algebra.startswith("sl") and frame.n >= 3:
                betas.append((outer_automorphism(frame), label + "^2"))
            for beta, chi_label in betas:
                chi = chi_twisted(*parse_type(chi_label))
                signs = set()
                for t in (2, 3, 5, -2):
                    rep = kostant_determinant(frame, beta, t)
                    assert abs(rep.det) == abs(chi(t * t)), (algebra, chi_label, t)
                    signs.add(1 if rep.det > 0 else -1)
                assert len(signs) == 1, (algebra, chi_label)
        assert time.perf_counter() - start < 10


# ---------------------------------------------------------------------------
# 7. banal comparison


def test_criterion_07_banal_comparison(criterion):
    with criterion(7, "excluded_classical primes > h equal primes > h dividing chi(q)"):
        for label in ["GL1", "GL2", "GL3", "GL4", "Sp4", "SO5"]:
            for q in (2, 3, 5):
                spec = lgroup_from_label(label, ArithContext.from_q(q))
                report = banal_report(spec)
                h = coxeter_untwisted(spec)
                chi_q = chi_global(spec)(q)
                lhs = {ell for ell in report.excluded_classical if ell > h}
                rhs = {ell for ell in prime_divisors(chi_q) if ell > h}
                assert lhs == rhs, (label, q, lhs, rhs)


# ---------------------------------------------------------------------------
# 8. cyclic cohomology


def cohomology_configs():
    """sigma = multiplication by a with a^(q-1) = 1, so every unit is an admissible Frobenius."""
    for q in (2, 3):
        p = q
        for n in range(1, 31):
            if n % p == 0:
                continue
            units = [a for a in range(1, n + 1) if math.gcd(a, n) == 1]
            for a in units:
                if pow(a, q - 1, n) != 1 % n:
                    continue
                M = next(k for k in range(1, 7) if pow(a, k, n) == 1 % n)
                for fr in units:
                    yield n, a, fr, q, M, p


def test_criterion_08_cyclic_cohomology(criterion):
    with criterion(8, "cyclic cohomology formula matches the stabilized brute force"):
        count = 0
        for n, a, fr, q, M, p in cohomology_configs():
            formula = cyclic_cohomology([n], a, fr, q, M, p)
            stable, table = stabilized_brute_force([n], a, fr, q, M, p)
            assert stable == formula, (n, a, fr, q, M, p, formula, stable)
            for m, res in table.items():
                if m % n == 0:
                    assert res == formula, (n, a, fr, q, M, m)
            count += 1
        assert count > 0


# ---------------------------------------------------------------------------
# 9. torus cocycle groups


def _monomial_codes(rows, ell):
    """Encode x -> (prod_j x_j^rows[i][j])_i over all x in (F_ell^*)^r as integers."""
    r = len(rows[0])
    units = np.arange(1, ell, dtype=np.int64)
    # table[c, v - 1] = v^c mod ell for exponents reduced mod ell - 1
    table = np.array([[pow(int(v), c, ell) for v in units] for c in range(ell - 1)], dtype=np.int64)
    idx = np.meshgrid(*([np.arange(ell - 1)] * r), indexing="ij")
    idx = [g.ravel() for g in idx]
    code = np.zeros(len(idx[0]), dtype=np.int64)
    for row in rows:
        val = np.ones_like(code)
        for c, i in zip(row, idx):
            val = val * table[c % (ell - 1)][i] % ell
        code = code * ell + val
    return code


def field_points(a_fr, a_s, q, ell):
    """Solutions (F, sigma) in (F_ell^*)^2r of F^(I - a_s^q) sigma^(a_fr - N_q) = 1.

    Histogram f(F) and g(sigma)^-1 and pair up equal values.
    """
    r = a_fr.rows
    ident = IntMatrix.identity(r)
    left = (ident - a_s ** q).to_rows()
    norm = IntMatrix.zeros(r, r)
    power = ident
    for _ in range(q):
        norm = norm + power
        power = power @ a_s
    right = (a_fr - norm).to_rows()
    f_hist = Counter(_monomial_codes(left, ell).tolist())
    g_inv_hist = Counter(_monomial_codes([[-c for c in row] for row in right], ell).tolist())
    return sum(c * g_inv_hist.get(k, 0) for k, c in f_hist.items())


FINITE_ORDER = {
    1: [[[1]], [[-1]]],
    2: [[[1, 0], [0, 1]], [[-1, 0], [0, -1]], [[0, 1], [1, 0]], [[0, -1], [-1, 0]], [[1, 0], [0, -1]],
        [[0, -1], [1, 0]], [[0, -1], [1, -1]], [[1, -1], [1, 0]]],
}


def torus_cocycle_configs():
    for r, options in FINITE_ORDER.items():
        mats = [IntMatrix.from_rows(m) for m in options]
        for a_fr in mats:
            for a_s in mats:
                for q in (2, 3, 4, 5):
                    if a_fr @ a_s @ (a_fr ** -1) == a_s ** q:
                        yield a_fr, a_s, q


def test_criterion_09_torus_cocycle_groups(criterion):
    with criterion(9, "torus cocycle SNF structure matches finite-field point counts"):
        one = IntMatrix.identity(1)
        for q in range(2, 10):
            free, tors = torus_cocycle_group(one, one, q)
            for ell in primes_up_to(50):
                expected = (ell - 1) * math.gcd(q - 1, ell - 1)
                assert torus_cocycle_count(free, tors, ell) == expected
        for a_fr, a_s, q in torus_cocycle_configs():
            free, tors = torus_cocycle_group(a_fr, a_s, q)
            for ell in primes_up_to(50):
                assert field_points(a_fr, a_s, q, ell) == torus_cocycle_count(free, tors, ell), (
                    a_fr.to_rows(), a_s.to_rows(), q, ell)


# ---------------------------------------------------------------------------
# 10. golden regression


def _golden():
    return json.loads(resources.files("langparams").joinpath("fixtures/golden_counts.json").read_text())


def _entry_for(entry, workers):
    spec = GroupSpecFin(entry["kind"], int(entry["n"]), make_field(int(entry["ell"]), int(entry["k"])))
    outer = TwistAut(None, True)
    tw = entry["twist"]
    sd = SemidirectData(outer if tw in ("fr", "both") else TwistAut(), outer if tw in ("s", "both") else TwistAut(),
                        int(entry["q"]))
    pts = enumerate_Z1(spec, sd, workers=workers)
    ident = FqMatrix.identity(spec.n, spec.field)
    text = json.dumps([[list(p.F0.entries), list(p.sigma0.entries)] for p in pts], separators=(",", ":"))
    out = {"kind": entry["kind"], "n": entry["n"], "ell": entry["ell"], "k": entry["k"], "q": entry["q"],
           "twist": tw, "count": str(len(pts)),
           "fiber_identity": str(sum(1 for p in pts if p.sigma0 == ident)),
           "digest": hashlib.sha256(text.encode()).hexdigest()}
    if "classes" in entry:
        classes = sorted((c.representative.entries, c.count) for c in inertial_classes(pts, spec))
        out["classes"] = [{"representative": [str(x) for x in rep], "count": str(c)} for rep, c in classes]
    return json.dumps(out, sort_keys=True)


def test_criterion_10_golden_regression(criterion, capsys):
    with criterion(10, "golden fixtures reproduce byte-identically across runs and worker counts"):
        golden = _golden()
        for entry in golden["points"]:
            want = json.dumps(entry, sort_keys=True)
            runs = [_entry_for(entry, 1), _entry_for(entry, 1), _entry_for(entry, 4)]
            assert all(r == want for r in runs), entry["kind"] + entry["n"]
        for entry in golden["h1_finite"]:
            G = enumerate_group(GroupSpecFin(entry["kind"], int(entry["n"]), make_field(int(entry["ell"]))))
            classes = h1_finite(int(entry["m"]), lambda h: h, G, mul=lambda a, b: a @ b)
            assert str(len(classes)) == entry["classes"]
            assert [str(s) for s in sorted(s for _, s in classes)] == entry["sizes"]
        # the CLI report is byte-stable as well
        outputs = []
        for workers in ("1", "1", "4"):
            assert run(["enumerate", "--group", "GL2", "--ell", "3", "--q", "2", "--workers", workers]) == 0
            outputs.append(capsys.readouterr().out)
        assert outputs[0] == outputs[1] == outputs[2]
        assert json.loads(outputs[0])["count"] == "96"
