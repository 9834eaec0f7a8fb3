"""Cohomology of tame inertia and of finite cyclic groups with finite coefficients.

A finite abelian group is given by its invariant factors [n_1, ..., n_r] and
represented as Z^r / diag(n_i) Z^r; automorphisms are integer matrices acting
on column vectors (a scalar c stands for c times the identity).

``cyclic_cohomology`` uses the closed form: H^1 of tame inertia (generator s
acting through a quotient of order M) is N_M^-1(A[p']) / (1 - s)A, and the
full group contributes the Fr-coinvariants of that quotient.  The brute-force
routines compute the same groups from cocycles of the cyclic quotients Z/(M m).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

from ..errors import BadAction, BadInput, SizeGuardError
from ..exactalg import (
    IntMatrix,
    hermite_rows,
    integer_kernel,
    invariant_factors,
    prime_divisors,
    rational_inverse,
)

BRUTE_FORCE_LIMIT = 10**6

# ---------------------------------------------------------------------------
# finite abelian groups as lattice quotients


@dataclass(frozen=True)
class FiniteAbelian:
    """Z^r / diag(moduli) Z^r with an integer-matrix automorphism convention."""

    moduli: tuple

    @classmethod
    def from_invariants(cls, invariants) -> "FiniteAbelian":
        mods = tuple(int(n) for n in invariants if int(n) != 1)
        if any(n <= 0 for n in mods):
            raise BadInput("invariant factors must be positive")
        return cls(mods)

    @property
    def rank(self) -> int:
        return len(self.moduli)

    @property
    def order(self) -> int:
        return math.prod(self.moduli)

    @property
    def exponent(self) -> int:
        return math.lcm(*self.moduli) if self.moduli else 1

    def elements(self):
        return itertools.product(*(range(n) for n in self.moduli))

    def reduce(self, v) -> tuple:
        return tuple(int(x) % n for x, n in zip(v, self.moduli))

    def relation_rows(self) -> list[list[int]]:
        r = self.rank
        return [[self.moduli[i] if j == i else 0 for j in range(r)] for i in range(r)]


def as_matrix(action, rank: int) -> IntMatrix:
    if isinstance(action, IntMatrix):
        M = action
    elif isinstance(action, int):
        M = IntMatrix.identity(rank).scale(action)
    else:
        M = IntMatrix.from_rows(action, rank)
    if M.rows != rank or M.cols != rank:
        raise BadAction(f"action must be a {rank}x{rank} matrix")
    return M


def _apply(A: FiniteAbelian, M: IntMatrix, v) -> tuple:
    return A.reduce(tuple(sum(M[i, j] * v[j] for j in range(A.rank)) for i in range(A.rank)))


def _check_endomorphism(A: FiniteAbelian, M: IntMatrix, name: str) -> None:
    # column j must be killed by n_j modulo the relations
    for j, nj in enumerate(A.moduli):
        for i, ni in enumerate(A.moduli):
            if (M[i, j] * nj) % ni:
                raise BadAction(f"{name} is not well defined on the group")


def _matrix_mod_equal(A: FiniteAbelian, X: IntMatrix, Y: IntMatrix) -> bool:
    basis = [tuple(int(i == j) for i in range(A.rank)) for j in range(A.rank)]
    return all(_apply(A, X, b) == _apply(A, Y, b) for b in basis)


def _is_automorphism(A: FiniteAbelian, M: IntMatrix) -> bool:
    if A.order > BRUTE_FORCE_LIMIT:
        return True
    seen = {_apply(A, M, v) for v in A.elements()}
    return len(seen) == A.order


def _p_prime_part(n: int, p: int) -> int:
    while p > 1 and n % p == 0:
        n //= p
    return n


# lattice helpers -----------------------------------------------------------


def _lattice(rows: list[list[int]]) -> list[list[int]]:
    return hermite_rows([list(r) for r in rows])


def _preimage(N: IntMatrix, target_rows: list[list[int]]) -> list[list[int]]:
    """Basis of {x : N x lies in the row lattice spanned by ``target_rows``}."""
    r = N.rows
    t = len(target_rows)
    big = [[N[i, j] for j in range(r)] + [-target_rows[k][i] for k in range(t)] for i in range(r)]
    ker = integer_kernel(IntMatrix.from_rows(big, r + t))
    return _lattice([list(row[:r]) for row in ker.to_rows()])


def _quotient_invariants(big: list[list[int]], small: list[list[int]]) -> list[int]:
    """Invariant factors of L_big / L_small (both full rank, small inside big)."""
    r = len(big)
    if r == 0:
        return []
    inv = rational_inverse(big)
    coords = []
    for g in small:
        row = [sum(Fraction(g[k]) * inv[k][j] for k in range(r)) for j in range(r)]
        if any(x.denominator != 1 for x in row):
            raise AssertionError("sublattice is not contained in the lattice")
        coords.append([int(x) for x in row])
    d = invariant_factors(IntMatrix.from_rows(coords, r))
    if any(x == 0 for x in d) or len(d) < r:
        raise AssertionError("quotient is not finite")
    return [x for x in d if x != 1]


def _image_rows(M: IntMatrix, basis: list[list[int]]) -> list[list[int]]:
    return [[sum(M[i, j] * b[j] for j in range(M.cols)) for i in range(M.rows)] for b in basis]


# ---------------------------------------------------------------------------
# closed form


@dataclass(frozen=True)
class CohomologyResult:
    h1_inertia: list
    h1_total: list

    def to_json(self) -> dict:
        return {"h1_inertia": [str(x) for x in self.h1_inertia],
                "h1_total": [str(x) for x in self.h1_total]}


def _prepare(invariants, sigma_action, fr_action, q: int, M: int):
    A = FiniteAbelian.from_invariants(invariants)
    S = as_matrix(sigma_action, A.rank)
    R = as_matrix(fr_action, A.rank)
    if M < 1 or q < 2:
        raise BadInput("need M >= 1 and q >= 2")
    if A.rank == 0:
        return A, S, R
    _check_endomorphism(A, S, "sigma")
    _check_endomorphism(A, R, "Fr")
    ident = IntMatrix.identity(A.rank)
    if not _matrix_mod_equal(A, S ** M, ident):
        raise BadAction("sigma does not have order dividing M")
    if not _matrix_mod_equal(A, R @ S, (S ** q) @ R):
        raise BadAction("the actions violate Fr s Fr^-1 = s^q")
    if not (_is_automorphism(A, S) and _is_automorphism(A, R)):
        raise BadAction("actions must be automorphisms")
    return A, S, R


def _norm(S: IntMatrix, k: int) -> IntMatrix:
    out = IntMatrix.zeros(S.rows, S.cols)
    power = IntMatrix.identity(S.rows)
    for _ in range(k):
        out = out + power
        power = power @ S
    return out


def cyclic_cohomology(invariants, sigma_action, fr_action, q: int, M: int, p: int) -> CohomologyResult:
    """Closed-form H^1 of tame inertia and of the tame group with coefficients in A."""
    A, S, R = _prepare(invariants, sigma_action, fr_action, q, M)
    if A.rank == 0:
        return CohomologyResult([], [])
    r = A.rank
    relations = A.relation_rows()
    ident = IntMatrix.identity(r)
    # A[p'] = p^v A where p^v is the p-part of the exponent
    pv = A.exponent // _p_prime_part(A.exponent, p)
    p_prime_rows = _lattice([[pv * int(i == j) for j in range(r)] for i in range(r)] + relations)
    K = _preimage(_norm(S, M), p_prime_rows)
    I_rows = _lattice(_image_rows(ident - S, [[int(i == j) for j in range(r)] for i in range(r)]) + relations)
    h1_inertia = _quotient_invariants(K, I_rows)
    # Fr acts on cocycle classes by [a] -> [q' Fr a] with q' q = 1 modulo the exponent
    e = A.exponent * M
    if math.gcd(q, e) != 1:
        raise BadInput("q must be invertible modulo the exponent of the group")
    q_inv = pow(q, -1, e)
    phi = R.scale(q_inv) - ident
    co_rows = _lattice(I_rows + _image_rows(phi, K))
    h1_total = _quotient_invariants(K, co_rows)
    return CohomologyResult(h1_inertia, h1_total)


# ---------------------------------------------------------------------------
# brute force


def structure_from_orders(orders) -> list[int]:
    """Invariant factors of a finite abelian group from the multiset of element orders."""
    orders = list(orders)
    n = len(orders)
    if n == 1:
        return []
    factors_by_prime = {}
    for ell in prime_divisors(n):
        # s_j = log_ell #{x : ell^j x = 0}
        s = [0]
        j = 1
        while True:
            count = sum(1 for o in orders if (ell ** j) % o == 0)
            sj = round(math.log(count, ell)) if count > 1 else 0
            s.append(sj)
            if ell ** sj == _ell_part(n, ell):
                break
            j += 1
        # number of cyclic factors of exponent >= j is s_j - s_(j-1)
        ge = [s[j] - s[j - 1] for j in range(1, len(s))] + [0]
        exps = []
        for j in range(1, len(s)):
            exps += [j] * (ge[j - 1] - ge[j])
        factors_by_prime[ell] = sorted(exps, reverse=True)
    width = max(len(v) for v in factors_by_prime.values())
    out = [1] * width
    for ell, exps in factors_by_prime.items():
        for i, x in enumerate(exps):
            out[i] *= ell ** x
    return sorted(x for x in out if x != 1)


def _ell_part(n: int, ell: int) -> int:
    out = 1
    while n % ell == 0:
        n //= ell
        out *= ell
    return out


def _span(A: FiniteAbelian, gens) -> set:
    """Subgroup generated by ``gens``."""
    zero = tuple(0 for _ in A.moduli)
    group = {zero}
    frontier = [zero]
    gens = [g for g in set(gens) if g != zero]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = A.reduce(tuple(a + b for a, b in zip(x, g)))
                if y not in group:
                    group.add(y)
                    nxt.append(y)
        frontier = nxt
    return group


def _quotient_orders(A: FiniteAbelian, Z: list, B: set) -> list[int]:
    """Orders of the cosets of B in Z, one entry per coset."""
    seen = set()
    orders = []
    for z in Z:
        if z in seen:
            continue
        coset = {A.reduce(tuple(a + b for a, b in zip(z, x))) for x in B}
        seen |= coset
        k = 1
        mult = z
        while mult not in B:
            mult = A.reduce(tuple(a + b for a, b in zip(mult, z)))
            k += 1
        orders.append(k)
    return orders


def brute_force_cohomology(invariants, sigma_action, fr_action, q: int, M: int, m: int) -> CohomologyResult:
    """H^1 of Z/(M m) (generator acting by sigma) and its Fr-coinvariants, from cocycles."""
    A, S, R = _prepare(invariants, sigma_action, fr_action, q, M)
    if A.rank == 0:
        return CohomologyResult([], [])
    n = M * m
    if A.order * n > BRUTE_FORCE_LIMIT:
        raise SizeGuardError(f"brute force needs {A.order * n} steps")
    if math.gcd(q, n) != 1:
        raise BadInput("q must be prime to the order of the cyclic quotient")
    elems = list(A.elements())
    sig = {v: _apply(A, S, v) for v in elems}

    def norm(a, k):
        total = tuple(0 for _ in A.moduli)
        cur = a
        for _ in range(k):
            total = A.reduce(tuple(x + y for x, y in zip(total, cur)))
            cur = sig[cur]
        return total

    zero = tuple(0 for _ in A.moduli)
    Z = [a for a in elems if norm(a, n) == zero]
    B = {A.reduce(tuple(x - y for x, y in zip(b, sig[b]))) for b in elems}
    h1_inertia = structure_from_orders(_quotient_orders(A, Z, B))
    # (Fr . eta)(s) = Fr(eta(Fr^-1 s Fr)) = Fr(eta(s^q')) with q q' = 1 mod n
    q_inv = pow(q, -1, n)
    moved = [A.reduce(tuple(x - y for x, y in zip(_apply(A, R, norm(a, q_inv)), a))) for a in Z]
    B_fr = _span(A, list(B) + moved)
    h1_total = structure_from_orders(_quotient_orders(A, Z, B_fr))
    return CohomologyResult(h1_inertia, h1_total)


def stable_multiplier(invariants, p: int) -> int:
    """A multiplier m, prime to p, beyond which the brute force no longer changes."""
    A = FiniteAbelian.from_invariants(invariants)
    return _p_prime_part(A.exponent, p)


def stabilized_brute_force(invariants, sigma_action, fr_action, q: int, M: int, p: int
                           ) -> tuple[CohomologyResult, dict]:
    """Brute force at m in {1..6} prime to p and at the stable multiplier.

    Returns the value at the stable multiplier (checked against one further
    multiple) together with the per-m table.
    """
    table = {}
    for m in range(1, 7):
        if m % p and math.gcd(q, M * m) == 1:
            table[m] = brute_force_cohomology(invariants, sigma_action, fr_action, q, M, m)
    m_star = stable_multiplier(invariants, p)
    stable = brute_force_cohomology(invariants, sigma_action, fr_action, q, M, m_star)
    k = next(k for k in range(2, 100) if k % p and math.gcd(q, M * m_star * k) == 1)
    again = brute_force_cohomology(invariants, sigma_action, fr_action, q, M, m_star * k)
    if again != stable:
        raise AssertionError("brute-force cohomology did not stabilize")
    table[m_star] = stable
    return stable, table


# ---------------------------------------------------------------------------
# nonabelian H^1 of a finite cyclic group


def h1_finite(m: int, action, elements: list, mul=None, inv=None, key=None,
              bound: int = BRUTE_FORCE_LIMIT) -> list[tuple[object, int]]:
    """Cocycle classes of Z/m acting on a finite group through ``action``.

    ``elements`` lists the group; ``mul``/``inv`` default to ``*`` and
    ``.inverse()``; ``key`` maps elements to hashables (default: identity).
    Returns (representative, class size) pairs in order of first appearance.
    """
    if m < 1:
        raise BadInput("m must be positive")
    if m * len(elements) > bound:
        raise SizeGuardError(f"m * |H| = {m * len(elements)} exceeds {bound}")
    mul = mul or (lambda a, b: a * b)
    inv = inv or (lambda a: a.inverse())
    key = key or (lambda a: a)
    keys = [key(h) for h in elements]
    index = {k: i for i, k in enumerate(keys)}
    act = [index[key(action(h))] for h in elements]
    ident = None
    for i, h in enumerate(elements):
        if index[key(mul(h, h))] == i:
            ident = i
            break
    # the action must have order dividing m
    for i in range(len(elements)):
        j = i
        for _ in range(m):
            j = act[j]
        if j != i:
            raise BadAction("action order does not divide m")
    cocycles = []
    for i, h in enumerate(elements):
        total = h
        cur = i
        for _ in range(m - 1):
            cur = act[cur]
            total = mul(total, elements[cur])
        if index[key(total)] == ident:
            cocycles.append(i)
    inverses = [index[key(inv(g))] for g in elements]
    remaining = set(cocycles)
    out = []
    for i in cocycles:
        if i not in remaining:
            continue
        orbit = {index[key(mul(mul(g, elements[i]), elements[inverses[act[gi]]]))]
                 for gi, g in enumerate(elements)}
        remaining -= orbit
        out.append((elements[i], len(orbit)))
    return out
