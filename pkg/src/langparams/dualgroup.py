"""L-group descriptors, global chi, point counts, banal primes and torus cocycle groups."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import BadAction, BadInput, NonPositiveCount, NotApplicable, NotPrime
from .exactalg import (
    IntMatrix,
    IntPoly,
    integer_kernel,
    invariant_factors,
    is_prime,
    prime_divisors,
    rational_rank,
)
from .rootdata import (
    BasedRootDatum,
    DiagramAutomorphism,
    chi_prime,
    chi_star_from_h,
    chi_twisted,
    fundamental_degrees,
    has_triality,
    parse_type,
    trivial_automorphism,
    twisted_coxeter,
)


@dataclass(frozen=True)
class ArithContext:
    """Residue characteristic p, residue field size q, and the tame data e, f."""

    p: int
    q: int
    e: int = 1
    f: int = 1

    def __post_init__(self):
        if not is_prime(self.p):
            raise NotPrime(f"p = {self.p} is not prime")
        m = self.q
        if m < self.p:
            raise BadInput(f"q = {self.q} is not a power of p = {self.p}")
        while m % self.p == 0:
            m //= self.p
        if m != 1:
            raise BadInput(f"q = {self.q} is not a power of p = {self.p}")
        if self.e < 1 or self.f < 1:
            raise BadInput("e and f must be positive")
        if math.gcd(self.e, self.p) != 1:
            raise BadInput("e must be prime to p")

    @classmethod
    def from_q(cls, q: int, e: int = 1, f: int = 1, p: int | None = None) -> "ArithContext":
        if p is None:
            if q < 2:
                raise BadInput("q must be >= 2")
            p = prime_divisors(q)[0]
        return cls(p, q, e, f)

    def to_json(self) -> dict:
        return {"p": str(self.p), "q": str(self.q), "e": str(self.e), "f": str(self.f)}


@dataclass(frozen=True)
class LFactor:
    """f copies of a datum permuted cyclically by Frobenius; ``twist`` is induced by Fr^f."""

    datum: BasedRootDatum
    f: int
    twist: DiagramAutomorphism
    type_label: str = ""

    def __post_init__(self):
        if self.f < 1:
            raise BadInput("cycle length f must be >= 1")


@dataclass(frozen=True)
class LGroupSpec:
    factors: tuple
    abelian_rank: int
    abelian_fr: IntMatrix
    context: ArithContext

    def __post_init__(self):
        if self.abelian_fr.rows != self.abelian_rank or self.abelian_fr.cols != self.abelian_rank:
            raise BadInput("abelian Frobenius matrix must be rank x rank")
        if self.abelian_rank:
            self.abelian_fr.order(10_000)
        for fac in self.factors:
            fac.twist.lattice_matrix.order(10_000)

    def has_exceptional(self) -> bool:
        return any(fac.datum.has_exceptional_factor() or has_triality(fac.datum, fac.twist)
                   for fac in self.factors)

    def num_positive_roots(self) -> int:
        return sum(fac.f * fac.datum.num_positive_roots for fac in self.factors)

    def weyl_order(self) -> int:
        out = 1
        for fac in self.factors:
            out *= math.prod(fundamental_degrees(fac.datum)) ** fac.f
        return out

    def to_json(self) -> dict:
        return {
            "factors": [{"type": fac.type_label or fac.datum.label, "f": str(fac.f),
                         "twist_order": str(fac.twist.order)} for fac in self.factors],
            "abelian": {"rank": str(self.abelian_rank), "fr_matrix": self.abelian_fr.to_json()},
            "context": self.context.to_json(),
        }

    @classmethod
    def from_json(cls, data: dict) -> "LGroupSpec":
        ctx = data["context"]
        context = ArithContext(int(ctx["p"]), int(ctx["q"]), int(ctx.get("e", 1)), int(ctx.get("f", 1)))
        factors = []
        for item in data.get("factors", []):
            tw = int(item.get("twist_order", 1))
            label = item["type"] + (f"^{tw}" if tw > 1 else "")
            d, beta = parse_type(label)
            factors.append(LFactor(d, int(item.get("f", 1)), beta, item["type"]))
        ab = data.get("abelian") or {"rank": 0}
        r = int(ab["rank"])
        fr = IntMatrix.from_json(ab["fr_matrix"]) if r else IntMatrix(0, 0, ())
        return cls(tuple(factors), r, fr, context)


def lgroup_from_label(label: str, context: ArithContext, f: int = 1) -> LGroupSpec:
    """Single-factor L-group from a type label such as ``GL3^2``; tori become the abelian part."""
    base = label.split("^")[0]
    if base.startswith("T") and base[1:].isdigit():
        r = int(base[1:])
        return LGroupSpec((), r, IntMatrix.identity(r), context)
    d, beta = parse_type(label)
    return LGroupSpec((LFactor(d, f, beta, base),), 0, IntMatrix(0, 0, ()), context)


def abelian_chi(spec: LGroupSpec) -> IntPoly:
    if spec.abelian_rank == 0:
        return IntPoly.const(1)
    M = spec.abelian_fr
    chi = M.charpoly()
    # finite order means Fr and Fr^-1 have the same characteristic polynomial
    if (M ** -1).charpoly() != chi:
        raise BadAction("abelian Frobenius is not of finite order")
    return chi.primitive()


def chi_global(spec: LGroupSpec, method: str = "auto") -> IntPoly:
    out = abelian_chi(spec)
    for fac in spec.factors:
        out = out * chi_twisted(fac.datum, fac.twist, method=method).substitute_power(fac.f)
    return out.primitive()


def chi_untwisted(spec: LGroupSpec) -> IntPoly:
    out = IntPoly.binomial(1, -1) ** spec.abelian_rank
    for fac in spec.factors:
        chi = chi_twisted(fac.datum, trivial_automorphism(fac.datum))
        out = out * chi ** fac.f
    return out


def coxeter_untwisted(spec: LGroupSpec) -> int:
    """h with trivial Frobenius action: the largest fundamental degree (1 for a torus)."""
    h = 1
    for fac in spec.factors:
        h = max([h] + fundamental_degrees(fac.datum))
    return h


def chevalley_steinberg(spec: LGroupSpec, q: int | None = None) -> int:
    """|G(F_q)| = q^N chi(q)."""
    if q is None:
        q = spec.context.q
    if q < 2:
        raise BadInput("q must be >= 2")
    value = chi_global(spec)(q)
    if value <= 0:
        raise NonPositiveCount(f"chi({q}) = {value} is not positive")
    return q ** spec.num_positive_roots() * value


def _primes_except(n: int, p: int) -> list[int]:
    return [ell for ell in prime_divisors(n) if ell != p]


@dataclass(frozen=True)
class BanalReport:
    chi: IntPoly
    chi_star: IntPoly
    h: int
    excluded_general: tuple
    excluded_classical: tuple | None
    g_nonbanal: tuple
    chi_prime: IntPoly | None = None
    excluded_triality: tuple | None = None
    h_untwisted: int = field(default=1)

    def to_json(self) -> dict:
        out = {
            "chi": self.chi.to_json(),
            "chi_star": self.chi_star.to_json(),
            "h": str(self.h),
            "h_untwisted": str(self.h_untwisted),
            "excluded_general": [str(x) for x in self.excluded_general],
            "excluded_classical": None if self.excluded_classical is None else [str(x) for x in self.excluded_classical],
            "g_nonbanal": [str(x) for x in self.g_nonbanal],
        }
        if self.chi_prime is not None:
            out["chi_prime"] = self.chi_prime.to_json()
            out["excluded_triality"] = [str(x) for x in self.excluded_triality]
        return out


def banal_report(spec: LGroupSpec) -> BanalReport:
    ctx = spec.context
    chi = chi_global(spec)
    h = twisted_coxeter(chi)
    cstar = chi_star_from_h(h)
    general = _primes_except(ctx.e * cstar(ctx.q), ctx.p)
    chi_q = chi(ctx.q)
    if chi_q == 0:
        raise NonPositiveCount("chi(q) vanishes")
    h1 = coxeter_untwisted(spec)
    classical = None
    if not spec.has_exceptional():
        classical = tuple(_primes_except(ctx.e * chi_q * math.factorial(h1), ctx.p))
    g_nonbanal = tuple(_primes_except(chi_q, ctx.p))
    cprime = None
    triality = None
    if any(has_triality(fac.datum, fac.twist) for fac in spec.factors):
        cprime = abelian_chi(spec)
        for fac in spec.factors:
            cprime = cprime * chi_prime(fac.datum, fac.twist).substitute_power(fac.f)
        triality = tuple(_primes_except(ctx.e * cprime(ctx.q), ctx.p))
    return BanalReport(chi, cstar, h, tuple(general), classical, g_nonbanal, cprime, triality, h1)


def primes_up_to(n: int) -> list[int]:
    if n < 2:
        return []
    sieve = bytearray([1]) * (n + 1)
    sieve[0:2] = b"\x00\x00"
    for i in range(2, int(n ** 0.5) + 1):
        if sieve[i]:
            sieve[i * i::i] = bytearray(len(sieve[i * i::i]))
    return [i for i in range(n + 1) if sieve[i]]


def compare_banal(spec: LGroupSpec, bound: int = 100) -> list[tuple[int, bool, bool]]:
    """(ell, excluded on the L-group side, non-banal on the group side) for h < ell <= bound."""
    if spec.has_exceptional():
        raise NotApplicable("the comparison is only asserted without exceptional or triality factors")
    if spec.context.e != 1:
        raise NotApplicable("the comparison concerns unramified groups (e = 1)")
    report = banal_report(spec)
    excl = set(report.excluded_classical)
    gset = set(report.g_nonbanal)
    return [(ell, ell in excl, ell in gset) for ell in primes_up_to(bound)
            if ell > report.h_untwisted and ell != spec.context.p]


# ---------------------------------------------------------------------------
# torus cocycles


def _check_finite_order(M: IntMatrix, name: str) -> int:
    try:
        return M.order(10_000)
    except ValueError as exc:
        raise BadAction(f"{name} does not have finite order") from exc


def cocycle_exponent_map(a_fr: IntMatrix, a_s: IntMatrix, q: int) -> IntMatrix:
    """The r x 2r exponent matrix [I - a_s^q | a_fr - sum_{i<q} a_s^i] of the cocycle relation."""
    r = a_fr.rows
    ident = IntMatrix.identity(r)
    left = ident - a_s ** q
    norm = IntMatrix.zeros(r, r)
    power = ident
    for _ in range(q):
        norm = norm + power
        power = power @ a_s
    right = a_fr - norm
    lr, rr = left.to_rows(), right.to_rows()
    return IntMatrix.from_rows([lr[i] + rr[i] for i in range(r)], 2 * r)


def torus_cocycle_group(a_fr: IntMatrix, a_s: IntMatrix, q: int) -> tuple[int, list[int]]:
    """Free rank and torsion invariant factors of the character group of Z^1 for a torus.

    Matrices act on exponent vectors: a point t = (t_1..t_r) is sent to the
    point with coordinates prod_j t_j^{A_ij}.  The defining equation of
    Z^1 is F^{I - a_s^q} * sigma^{a_fr - N_q} = 1, and the characters of the
    solution group form the cokernel of the transposed exponent matrix.
    """
    if q < 2:
        raise BadInput("q must be >= 2")
    if a_fr.rows != a_fr.cols or a_s.rows != a_s.cols or a_fr.rows != a_s.rows:
        raise BadInput("actions must be square of equal size")
    _check_finite_order(a_fr, "a_fr")
    _check_finite_order(a_s, "a_s")
    if a_fr @ a_s @ (a_fr ** -1) != a_s ** q:
        raise BadAction("a_fr a_s a_fr^-1 must equal a_s^q")
    r = a_fr.rows
    phi_t = cocycle_exponent_map(a_fr, a_s, q).transpose()
    factors = invariant_factors(phi_t)
    rank = sum(1 for d in factors if d)
    return 2 * r - rank, [d for d in factors if d > 1]


def torus_cocycle_count(free_rank: int, torsion: list[int], ell: int, k: int = 1) -> int:
    """Number of F_{ell^k}-points of a diagonalisable group with the given character group."""
    m = ell ** k - 1
    out = m ** free_rank
    for d in torsion:
        out *= math.gcd(d, m)
    return out


def git_component_descriptor(t_rank: int, beta_on_chars: IntMatrix, weyl: list[IntMatrix]) -> tuple[int, int]:
    """(rank of the beta-invariant characters, order of the beta-fixed Weyl subgroup)."""
    if beta_on_chars.rows != t_rank:
        raise BadInput("beta must act on a lattice of rank t_rank")
    _check_finite_order(beta_on_chars, "beta")
    K = integer_kernel(beta_on_chars - IntMatrix.identity(t_rank))
    inv_rank = K.rows
    binv = beta_on_chars ** -1
    fixed = sum(1 for w in weyl if beta_on_chars @ w @ binv == w)
    return inv_rank, fixed


def coinvariant_rank(beta_on_chars: IntMatrix) -> int:
    """Rank of ker(beta - I), computed over Q as a cross-check of the lattice version."""
    n = beta_on_chars.rows
    return n - rational_rank((beta_on_chars - IntMatrix.identity(n)).to_rows())
