"""Enumeration of tame parameters (F0, sigma0) over a finite field, and point-level checks.

A point is a pair of group elements with

    F0 * theta_fr(sigma0) * theta_s^q(F0)^-1 = N_q(sigma0),
    N_q(sigma0) = sigma0 * theta_s(sigma0) * ... * theta_s^(q-1)(sigma0),

which is the relation Fr s Fr^-1 = s^q read in the semidirect product
G x| <Fr, s>.  Elements of G x| <s> are modelled as pairs (g, k) with k taken
modulo the order of theta_s and product (g1, k1)(g2, k2) = (g1 theta_s^k1(g2), k1 + k2).
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from ..errors import BadAction, BadInput, NotSupported, TooManyPairs
from ..exactalg import IntPoly
from ..fingrp import (
    FiniteField,
    FqMatrix,
    GroupSpecFin,
    crt_exponents,
    element_order,
    embed_matrix,
    is_unipotent,
    make_field,
)
from .semidirect import GroupContext, SemidirectData, TwistAut, _perm_power

DEFAULT_PAIR_BOUND = 10_000_000


@dataclass(frozen=True)
class LElement:
    """Element (g, k) of G x| <s>, k modulo the order of theta_s."""

    g: FqMatrix
    k: int

    def to_json(self) -> dict:
        return {"g": self.g.to_json(), "k": str(self.k)}

    def is_trivial(self) -> bool:
        return self.k == 0 and self.g.is_identity()


@dataclass(frozen=True)
class TameParameterPoint:
    F0: FqMatrix
    sigma0: FqMatrix
    spec: GroupSpecFin = field(compare=False)
    sd: SemidirectData = field(compare=False, repr=False)
    sigma_ss: LElement | None = field(default=None, compare=False)
    sigma_u: LElement | None = field(default=None, compare=False)

    def sort_key(self):
        return (self.F0.entries, self.sigma0.entries)


# ---------------------------------------------------------------------------
# L-group arithmetic in the (g, k) model


def twisted_norm(sigma: FqMatrix, theta_s: TwistAut, j: int) -> FqMatrix:
    """N_j(sigma) = sigma theta_s(sigma) ... theta_s^(j-1)(sigma)."""
    out = FqMatrix.identity(sigma.n, sigma.field)
    cur = sigma
    for _ in range(j):
        out = out @ cur
        cur = theta_s.apply(cur)
    return out


def l_power(sigma: FqMatrix, theta_s: TwistAut, order_s: int, e: int) -> LElement:
    """(sigma, 1)^e for e >= 0, using (sigma, 1)^order_s = (N_order_s(sigma), 0)."""
    g0 = twisted_norm(sigma, theta_s, order_s)
    t, r = divmod(e, order_s)
    return LElement(g0 ** t @ twisted_norm(sigma, theta_s, r), r)


def l_order(sigma: FqMatrix, theta_s: TwistAut, order_s: int) -> int:
    g0 = twisted_norm(sigma, theta_s, order_s)
    return order_s * element_order(g0)


def l_jordan(sigma: FqMatrix, theta_s: TwistAut, order_s: int) -> tuple[LElement, LElement, int]:
    """Semisimple and unipotent parts of (sigma, 1) computed inside the cyclic group it generates."""
    order = l_order(sigma, theta_s, order_s)
    a, b = crt_exponents(order, sigma.field.ell)
    return l_power(sigma, theta_s, order_s, a), l_power(sigma, theta_s, order_s, b), order


def l_is_unipotent(x: LElement) -> bool:
    return x.k == 0 and is_unipotent(x.g)


# ---------------------------------------------------------------------------
# enumeration


def _relation_sides(ctx: GroupContext, sd: SemidirectData):
    pf, ps = sd.perms(ctx)
    psq = _perm_power(ps, sd.q)
    return pf, ps, psq


def _norm_index(ctx: GroupContext, ps: np.ndarray, i: int, q: int) -> np.ndarray:
    F = ctx.F
    out = np.eye(ctx.n, dtype=np.int64)
    j = i
    for _ in range(q):
        out = F.matmul_arr(out, ctx.arr[j])
        j = ps[j]
    return out


def _solve_for_sigma(ctx: GroupContext, sd: SemidirectData, pf, ps, psq, i: int) -> np.ndarray:
    """Indices of all F0 with F0 theta_fr(sigma_i) = N_q(sigma_i) theta_s^q(F0)."""
    F = ctx.F
    lhs = F.matmul_arr(ctx.arr, ctx.arr[pf[i]][None])
    N = _norm_index(ctx, ps, i, sd.q)
    rhs = F.matmul_arr(N[None], ctx.arr[psq])
    return np.nonzero(np.all(lhs == rhs, axis=(1, 2)))[0]


def enumerate_pairs(spec: GroupSpecFin, sd: SemidirectData, max_pairs: int = DEFAULT_PAIR_BOUND,
                    workers: int = 1) -> tuple[GroupContext, list[tuple[int, int]]]:
    """(F index, sigma index) pairs of all points, sorted canonically."""
    ctx = GroupContext(spec)
    if ctx.size ** 2 > max_pairs:
        raise TooManyPairs(ctx.size ** 2, max_pairs)
    sd.require(ctx)
    pf, ps, psq = _relation_sides(ctx, sd)

    def work(chunk):
        out = []
        for i in chunk:
            for f in _solve_for_sigma(ctx, sd, pf, ps, psq, i):
                out.append((int(f), int(i)))
        return out

    indices = list(range(ctx.size))
    if workers <= 1:
        pairs = work(indices)
    else:
        chunks = [indices[w::workers] for w in range(workers)]
        with ThreadPoolExecutor(max_workers=workers) as pool:
            pairs = [p for part in pool.map(work, chunks) for p in part]
    pairs.sort()
    return ctx, pairs


class PointFactory:
    """Builds points with Jordan parts, caching everything that depends on sigma only."""

    def __init__(self, ctx: GroupContext, sd: SemidirectData):
        self.ctx = ctx
        self.sd = sd
        self._jordan: dict = {}

    def jordan(self, i: int):
        if i not in self._jordan:
            sigma = self.ctx.matrix(i)
            self._jordan[i] = l_jordan(sigma, self.sd.theta_s, self.sd.order_s)
        return self._jordan[i]

    def point(self, f: int, i: int) -> TameParameterPoint:
        ss, u, _ = self.jordan(i)
        return TameParameterPoint(self.ctx.matrix(f), self.ctx.matrix(i), self.ctx.spec, self.sd, ss, u)


def enumerate_Z1(spec: GroupSpecFin, sd: SemidirectData, max_pairs: int = DEFAULT_PAIR_BOUND,
                 workers: int = 1) -> list[TameParameterPoint]:
    ctx, pairs = enumerate_pairs(spec, sd, max_pairs, workers)
    factory = PointFactory(ctx, sd)
    return [factory.point(f, i) for f, i in pairs]


def relation_holds(F0: FqMatrix, sigma0: FqMatrix, sd: SemidirectData) -> bool:
    """Direct check of F0 theta_fr(sigma0) theta_s^q(F0)^-1 = N_q(sigma0)."""
    theta_sq_F = F0
    for _ in range(sd.q):
        theta_sq_F = sd.theta_s.apply(theta_sq_F)
    lhs = F0 @ sd.theta_fr.apply(sigma0) @ theta_sq_F.inverse()
    return lhs == twisted_norm(sigma0, sd.theta_s, sd.q)


# ---------------------------------------------------------------------------
# independent oracle: multiplication in G x| <theta_fr, theta_s>


def _aut_power(theta: TwistAut, e: int) -> TwistAut:
    out = TwistAut()
    for _ in range(e):
        out = out.compose(theta)
    return out


class _SemidirectElement:
    """(g, alpha) with alpha an automorphism; (g1, a1)(g2, a2) = (g1 a1(g2), a1 a2)."""

    __slots__ = ("g", "alpha")

    def __init__(self, g: FqMatrix, alpha: TwistAut):
        self.g = g
        self.alpha = alpha

    def __mul__(self, other):
        return _SemidirectElement(self.g @ self.alpha.apply(other.g), self.alpha.compose(other.alpha))

    def inverse(self, alpha_inv: TwistAut):
        return _SemidirectElement(alpha_inv.apply(self.g.inverse()), alpha_inv)


def oracle_points(spec: GroupSpecFin, sd: SemidirectData, elements: list[FqMatrix] | None = None
                  ) -> list[tuple[FqMatrix, FqMatrix]]:
    """Pairs with (F0, Fr)(sigma0, s)(F0, Fr)^-1 = (sigma0, s)^q, compared on the group part.

    Plain Python loops over all pairs; only for small groups.
    """
    from ..fingrp import enumerate_group

    G = elements if elements is not None else enumerate_group(spec)
    ctx = GroupContext(spec)
    sd.verify(ctx)
    fr_inv = _aut_power(sd.theta_fr, sd.order_fr - 1)
    out = []
    for sigma in G:
        s_elt = _SemidirectElement(sigma, sd.theta_s)
        power = _SemidirectElement(FqMatrix.identity(spec.n, spec.field), TwistAut())
        for _ in range(sd.q):
            power = power * s_elt
        for F0 in G:
            fr_elt = _SemidirectElement(F0, sd.theta_fr)
            lhs = fr_elt * s_elt * fr_elt.inverse(fr_inv)
            if lhs.g == power.g:
                out.append((F0, sigma))
    out.sort(key=lambda p: (p[0].entries, p[1].entries))
    return out


# ---------------------------------------------------------------------------
# fibers


def twisted_centralizer(ctx: GroupContext, sd: SemidirectData, xi: FqMatrix) -> np.ndarray:
    """Indices of c with c xi theta_s(c)^-1 = xi, i.e. c centralises (xi, s)."""
    F = ctx.F
    _, ps = sd.perms(ctx)
    lhs = F.matmul_arr(ctx.arr, xi.array()[None])
    rhs = F.matmul_arr(xi.array()[None], ctx.arr[ps])
    return np.nonzero(np.all(lhs == rhs, axis=(1, 2)))[0]


def fiber_over_sigma(points: list[TameParameterPoint], xi: FqMatrix, check: bool = True
                     ) -> list[TameParameterPoint]:
    """Points with sigma0 = xi; optionally asserts the torsor structure of the fiber."""
    fiber = [p for p in points if p.sigma0 == xi]
    if check and fiber:
        report = torsor_report(fiber, xi)
        if not report["ok"]:
            raise AssertionError(f"fiber over {xi.entries} is not a torsor: {report}")
    return fiber


def torsor_report(fiber: list[TameParameterPoint], xi: FqMatrix) -> dict:
    """Compare {F_x F_0^-1} with the centraliser of (xi, s); equality gives both torsor claims."""
    p0 = fiber[0]
    ctx = GroupContext(p0.spec)
    cent = set(int(i) for i in twisted_centralizer(ctx, p0.sd, xi))
    f0_inv = p0.F0.inverse()
    ratios = set(ctx.index(p.F0 @ f0_inv) for p in fiber)
    inside = ratios <= cent
    return {"ok": inside and len(fiber) == len(cent) and ratios == cent,
            "ratios_in_centralizer": inside, "fiber_size": len(fiber), "centralizer_size": len(cent)}


# ---------------------------------------------------------------------------
# point bounds


def weyl_order_of(spec: GroupSpecFin) -> int:
    if spec.kind in ("GL", "SL", "U"):
        return math.factorial(spec.n)
    if spec.kind == "Sp":
        m = spec.n // 2
        return 2 ** m * math.factorial(m)
    return 1


@dataclass(frozen=True)
class BoundsReport:
    jordan_ok: bool
    unipotent_ok: bool
    estimate_ok: bool
    ss_order: int
    order: int
    jordan_bound: int
    unipotence_exponent: int

    def all_ok(self) -> bool:
        return self.jordan_ok and self.unipotent_ok and self.estimate_ok

    def to_json(self) -> dict:
        return {"jordan_ok": self.jordan_ok, "unipotent_ok": self.unipotent_ok, "estimate_ok": self.estimate_ok,
                "ss_order": str(self.ss_order), "order": str(self.order),
                "jordan_bound": str(self.jordan_bound), "unipotence_exponent": str(self.unipotence_exponent)}


def check_point_bounds(pt: TameParameterPoint, ctx, chi: IntPoly) -> BoundsReport:
    """Order bounds on the inertial value of a point.

    (a) the semisimple part has order prime to ell dividing e (q^(fN) - 1), N = |Weyl|;
    (b) (sigma, s)^M is unipotent, M = q^(n!) - 1 for untwisted GL_n, else e (q^(fN) - 1);
    (c) a semisimple (sigma, s) has order dividing e chi(q)^2.
    ``ctx`` is an :class:`~langparams.dualgroup.ArithContext`.
    """
    return _bounds_cached(pt.sigma0, pt.sd.theta_s, pt.sd.order_s, pt.spec, ctx.q, ctx.e, ctx.f, chi)


@lru_cache(maxsize=100_000)
def _bounds_cached(sigma, theta_s, order_s, spec, q, e, f, chi) -> BoundsReport:
    ell = sigma.field.ell
    N = weyl_order_of(spec)
    ss, u, order = l_jordan(sigma, theta_s, order_s)
    a, _ = crt_exponents(order, ell)
    ss_order = order // math.gcd(order, a)
    jordan_bound = e * (q ** (f * N) - 1)
    jordan_ok = ss_order % ell != 0 and jordan_bound % ss_order == 0
    if spec.kind == "GL" and theta_s.is_trivial():
        M = q ** math.factorial(spec.n) - 1
    else:
        M = jordan_bound
    unipotent_ok = l_is_unipotent(l_power(sigma, theta_s, order_s, M))
    if u.is_trivial():
        estimate_ok = (e * chi(q) ** 2) % order == 0
    else:
        estimate_ok = True
    return BoundsReport(jordan_ok, unipotent_ok, estimate_ok, ss_order, order, jordan_bound, M)


# ---------------------------------------------------------------------------
# SL2-type parameters


def _weight_strings(weights: list[int]) -> list[tuple[int, int]]:
    """Split a weight list into consecutive strings d, d-2, ..., -d; returns (start, d)."""
    out = []
    i = 0
    while i < len(weights):
        d = weights[i]
        if d < 0:
            raise BadInput(f"weight string cannot start with a negative weight ({d})")
        expect = list(range(d, -d - 1, -2))
        if weights[i:i + d + 1] != expect:
            raise BadInput(f"weights {weights} do not split into strings d, d-2, ..., -d")
        out.append((i, d))
        i += d + 1
    return out


def sl2_images(weights: list[int], F: FiniteField, r: int) -> tuple[FqMatrix, FqMatrix]:
    """Images of U = [[1,1],[0,1]] and S = diag(r, 1/r) under the representation with these weights.

    On each string of length d+1 the representation is Sym^d with basis
    x^(d-i) y^i, so U acts by binomial coefficients and S by r^weight.
    """
    n = len(weights)
    U = [[0] * n for _ in range(n)]
    S = [[0] * n for _ in range(n)]
    for start, d in _weight_strings(weights):
        for i in range(d + 1):
            for j in range(i + 1):
                U[start + j][start + i] = F.from_int(math.comb(i, j))
            S[start + i][start + i] = F.power(r, d - 2 * i)
    return FqMatrix.from_rows(U, F), FqMatrix.from_rows(S, F)


@dataclass(frozen=True)
class SL2Result:
    point: TameParameterPoint
    field: FiniteField
    sqrt_q: int
    extended: bool


def sl2_parameter(weights: list[int], F_part: FqMatrix | None, field: FiniteField, q: int,
                  kind: str = "GL") -> SL2Result:
    """The point sigma0 = lambda(U), F0 = lambda(S) F_part for the untwisted action.

    When q has no square root in ``field`` the field degree is doubled.
    """
    n = len(weights)
    F = field
    qq = F.from_int(q)
    r = F.sqrt(qq)
    extended = False
    if r is None:
        F = make_field(field.ell, 2 * field.k)
        extended = True
        r = F.sqrt(F.from_int(q))
    if F_part is None:
        F_part = FqMatrix.identity(n, F)
    elif F_part.field is not F:
        F_part = embed_matrix(F_part, F)
    U, S = sl2_images(weights, F, r)
    sd = SemidirectData.trivial(q)
    F0 = S @ F_part
    if not relation_holds(F0, U, sd):
        raise BadInput("F_part does not centralise the SL2 image; the relation fails")
    spec = GroupSpecFin(kind, n, F)
    if not spec.contains(F0) or not spec.contains(U):
        raise BadInput(f"the constructed point does not lie in {kind}{n}")
    sd.order_fr = sd.order_s = 1
    sd.w_relation_ok = True
    ss, u, _ = l_jordan(U, sd.theta_s, 1)
    return SL2Result(TameParameterPoint(F0, U, spec, sd, ss, u), F, r, extended)


# ---------------------------------------------------------------------------
# inertial classes


@dataclass(frozen=True)
class InertialClass:
    representative: FqMatrix
    k: int
    beta_label: str
    count: int

    def to_json(self) -> dict:
        return {"representative": self.representative.to_json(), "k": str(self.k),
                "beta_label": self.beta_label, "count": str(self.count)}


def inertial_classes(points: list[TameParameterPoint], spec: GroupSpecFin) -> list[InertialClass]:
    """Group points by the conjugacy class of the semisimple part of (sigma0, s).

    Conjugation by g sends (h, k) to (g h theta_s^k(g)^-1, k).  For GL the
    centralisers involved are connected, so each class carries the single
    label "1"; the grouping over one finite field approximates the
    components over an algebraic closure.
    """
    if spec.kind != "GL":
        raise NotSupported("component labels are only implemented for GL")
    if not points:
        return []
    ctx = GroupContext(spec)
    sd = points[0].sd
    _, ps = sd.perms(ctx)
    F = ctx.F
    rep_of: dict = {}
    counts: dict = {}
    for pt in points:
        ss = pt.sigma_ss
        key = (ss.g.entries, ss.k)
        if key not in rep_of:
            psk = _perm_power(ps, ss.k)
            conj = F.matmul_arr(F.matmul_arr(ctx.arr, ss.g.array()[None]), ctx.arr[ctx.inverse_perm[psk]])
            orbit = ctx.index_of(conj)
            rep = int(orbit.min())
            for idx in set(int(x) for x in orbit):
                rep_of[(tuple(int(v) for v in ctx.arr[idx].ravel()), ss.k)] = rep
        label = (rep_of[key], ss.k)
        counts[label] = counts.get(label, 0) + 1
    out = [InertialClass(ctx.matrix(rep), k, "1", c) for (rep, k), c in counts.items()]
    out.sort(key=lambda c: (c.representative.entries, c.k))
    return out
