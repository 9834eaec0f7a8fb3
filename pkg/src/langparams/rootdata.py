"""Based root data, Weyl groups, diagram automorphisms and twisted characteristic polynomials.

A datum is realised on an explicit lattice ``X = Z^rank``.  Roots live in X,
coroots in the dual lattice written in the dual basis, so the pairing is the
ordinary dot product.

Supported labels::

    A<n> B<n> C<n> D<n> G2 F4 E6 E7 E8   adjoint type, realised on the root lattice
    SL<n>                                 simply connected type A, on the weight lattice
    GL<n>  Sp<2n>  SO<n>                  the usual Z^n realisations
    T<r>                                  a split torus of rank r

Factors are joined by ``x`` (or the multiplication sign) and a factor may carry
a ``^2`` or ``^3`` suffix requesting the diagram automorphism of that order.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np

from .errors import DegenerateChi, NotSupported, UnsupportedType, WeylTooLarge
from .exactalg import (
    IntMatrix,
    IntPoly,
    charpoly_from_rows,
    cyclotomic,
    cyclotomic_factorization,
    integer_kernel,
    primitive_lcm,
)

DEFAULT_WEYL_BOUND = 2_000_000
# the oracle cross-check inside method="auto" only runs for groups this small
AUTO_CROSSCHECK_LIMIT = 20_000

EXCEPTIONAL = ("G2", "F4", "E6", "E7", "E8")


@dataclass(frozen=True)
class FactorInfo:
    """One simple (or torus) factor of a datum.

    ``family`` is the Dynkin letter (or ``"T"``), ``ss_rank`` the number of
    simple roots it contributes, ``simple_slice`` their positions in the
    datum's simple-root list.
    """

    family: str
    ss_rank: int
    simple_slice: tuple
    source_label: str


@dataclass(frozen=True)
class BasedRootDatum:
    label: str
    rank: int
    roots: tuple
    coroots: tuple
    simple_indices: tuple
    cartan: IntMatrix
    factors: tuple = field(default=(), compare=False)

    @property
    def simple_roots(self) -> list[tuple]:
        return [self.roots[i] for i in self.simple_indices]

    @property
    def simple_coroots(self) -> list[tuple]:
        return [self.coroots[i] for i in self.simple_indices]

    @property
    def semisimple_rank(self) -> int:
        return len(self.simple_indices)

    @property
    def central_rank(self) -> int:
        return self.rank - self.semisimple_rank

    @property
    def num_positive_roots(self) -> int:
        return len(self.roots) // 2

    def is_torus(self) -> bool:
        return not self.roots

    def has_exceptional_factor(self) -> bool:
        return any(f.family in EXCEPTIONAL for f in self.factors)

    def simple_reflections(self) -> list[IntMatrix]:
        """Matrices of s_i acting on column vectors of X."""
        out = []
        for a, c in zip(self.simple_roots, self.simple_coroots):
            rows = [[int(i == j) - a[i] * c[j] for j in range(self.rank)] for i in range(self.rank)]
            out.append(IntMatrix.from_rows(rows, self.rank))
        return out

    def simple_coefficients(self, root: Sequence[int]) -> list[Fraction]:
        """Coordinates of a vector in X with respect to the simple roots."""
        return _solve_in_span([list(a) for a in self.simple_roots], list(root))


@dataclass(frozen=True)
class DiagramAutomorphism:
    """Automorphism of X preserving roots and simple roots.

    ``factor_twists`` records, factor by factor, the order of the induced
    diagram symmetry when the automorphism was built from a label; it is
    ``None`` for automorphisms supplied directly as matrices.
    """

    lattice_matrix: IntMatrix
    simple_perm: tuple
    order: int
    factor_twists: tuple | None = None

    def inverse_matrix(self) -> IntMatrix:
        return self.lattice_matrix ** (self.order - 1)

    def is_trivial(self) -> bool:
        return self.order == 1


# ---------------------------------------------------------------------------
# Cartan matrices and realisations


def _cartan_from_vectors(simple_roots, simple_coroots) -> list[list[int]]:
    k = len(simple_roots)
    return [[sum(a * c for a, c in zip(simple_roots[j], simple_coroots[i])) for j in range(k)] for i in range(k)]


def _classical_vectors(family: str, n: int):
    """Simple roots / coroots of the classical families inside Z^n (n = rank)."""
    e = lambda i: tuple(int(t == i) for t in range(n))  # noqa: E731
    sub = lambda u, v: tuple(x - y for x, y in zip(u, v))  # noqa: E731
    add = lambda u, v: tuple(x + y for x, y in zip(u, v))  # noqa: E731
    roots, coroots = [], []
    for i in range(n - 1):
        r = sub(e(i), e(i + 1))
        roots.append(r)
        coroots.append(r)
    if family == "B":
        roots.append(e(n - 1))
        coroots.append(tuple(2 * x for x in e(n - 1)))
    elif family == "C":
        roots.append(tuple(2 * x for x in e(n - 1)))
        coroots.append(e(n - 1))
    elif family == "D":
        if n >= 2:
            r = add(e(n - 2), e(n - 1))
            roots.append(r)
            coroots.append(r)
    return roots, coroots


def _cartan_classical(family: str, n: int) -> list[list[int]]:
    if family == "A":
        roots, coroots = _classical_vectors("GL", n + 1)
    else:
        roots, coroots = _classical_vectors(family, n)
    return _cartan_from_vectors(roots, coroots)


def _cartan_exceptional(label: str) -> list[list[int]]:
    if label == "G2":
        return [[2, -3], [-1, 2]]
    if label == "F4":
        return [[2, -1, 0, 0], [-1, 2, -1, 0], [0, -2, 2, -1], [0, 0, -1, 2]]
    n = int(label[1:])
    # E_n: chain 1-3-4-5-...-n with node 2 attached to node 4
    edges = [(1, 3), (3, 4), (2, 4)] + [(i, i + 1) for i in range(4, n)]
    c = [[2 * int(i == j) for j in range(n)] for i in range(n)]
    for a, b in edges:
        c[a - 1][b - 1] = c[b - 1][a - 1] = -1
    return c


def _close_roots(simple_roots, simple_coroots):
    """All (root, coroot) pairs reachable from the simple ones by simple reflections."""
    simple = list(zip(simple_roots, simple_coroots))
    seen = dict.fromkeys(simple)
    frontier = list(simple)
    while frontier:
        new = []
        for a, c in frontier:
            for ai, ci in simple:
                k = sum(x * y for x, y in zip(a, ci))
                m = sum(x * y for x, y in zip(ai, c))
                pair = (tuple(x - k * y for x, y in zip(a, ai)), tuple(x - m * y for x, y in zip(c, ci)))
                if pair not in seen:
                    seen[pair] = None
                    new.append(pair)
        frontier = new
    pairs = sorted(seen)
    return pairs


def _make_datum(label, rank, simple_roots, simple_coroots, factors) -> BasedRootDatum:
    if simple_roots:
        pairs = _close_roots([tuple(a) for a in simple_roots], [tuple(c) for c in simple_coroots])
    else:
        pairs = []
    roots = tuple(p[0] for p in pairs)
    coroots = tuple(p[1] for p in pairs)
    index = {p: i for i, p in enumerate(pairs)}
    simple_indices = tuple(index[(tuple(a), tuple(c))] for a, c in zip(simple_roots, simple_coroots))
    cartan = _cartan_from_vectors(simple_roots, simple_coroots)
    k = len(simple_roots)
    return BasedRootDatum(label, rank, roots, coroots, simple_indices,
                          IntMatrix.from_rows(cartan, k) if k else IntMatrix(0, 0, ()), tuple(factors))


_LABEL_RE = re.compile(r"^(GL|SL|Sp|SO|A|B|C|D|G|F|E|T)(\d+)(?:\^(\d+))?$")


def _parse_factor(tok: str):
    m = _LABEL_RE.match(tok.strip())
    if not m:
        raise UnsupportedType(f"unknown type label {tok!r}")
    kind, num, tw = m.group(1), int(m.group(2)), m.group(3)
    twist = int(tw) if tw else 1
    if twist not in (1, 2, 3):
        raise UnsupportedType(f"twist order {twist} not supported in {tok!r}")
    return kind, num, twist


def _single_factor(kind: str, num: int, twist: int):
    """Return (rank, simple_roots, simple_coroots, family, ss_rank) for one factor."""
    if kind == "T":
        if num < 1:
            raise UnsupportedType("torus rank must be >= 1")
        return num, [], [], "T", 0
    if kind == "GL":
        if not 1 <= num <= 13:
            raise UnsupportedType(f"GL{num} outside supported range")
        r, c = _classical_vectors("GL", num)
        return num, r, c, ("A" if num > 1 else "T"), num - 1
    if kind == "Sp":
        if num % 2 or not 2 <= num <= 24:
            raise UnsupportedType(f"Sp{num}: need an even size up to 24")
        n = num // 2
        r, c = _classical_vectors("C", n)
        return n, r, c, ("C" if n > 1 else "A"), n
    if kind == "SO":
        if not 2 <= num <= 25:
            raise UnsupportedType(f"SO{num} outside supported range")
        n = num // 2
        if num % 2:
            r, c = _classical_vectors("B", n)
            return n, r, c, ("B" if n > 1 else "A"), n
        if n == 4 and twist == 3:
            # triality does not preserve the SO8 lattice; use the D4 root lattice
            return _adjoint("D", 4)
        if n == 1:
            return 1, [], [], "T", 0
        r, c = _classical_vectors("D", n)
        return n, r, c, "D", n
    if kind == "SL":
        if not 2 <= num <= 13:
            raise UnsupportedType(f"SL{num} outside supported range")
        cartan = _cartan_classical("A", num - 1)
        k = num - 1
        # weight lattice: basis of fundamental weights; coroots are the dual basis
        roots = [[cartan[i][j] for i in range(k)] for j in range(k)]
        coroots = [[int(i == j) for j in range(k)] for i in range(k)]
        return k, roots, coroots, "A", k
    if kind in ("A", "B", "C", "D"):
        lo = {"A": 1, "B": 2, "C": 2, "D": 3}[kind]
        if not lo <= num <= 12:
            raise UnsupportedType(f"{kind}{num} outside supported range")
        return _adjoint(kind, num)
    label = f"{kind}{num}"
    if label not in EXCEPTIONAL:
        raise UnsupportedType(f"unknown type label {label!r}")
    return _adjoint(label, None)


def _adjoint(family: str, n):
    if n is None:
        cartan = _cartan_exceptional(family)
        fam = family
    else:
        cartan = _cartan_classical(family, n)
        fam = family
    k = len(cartan)
    roots = [[int(i == j) for j in range(k)] for i in range(k)]
    coroots = [list(row) for row in cartan]
    return k, roots, coroots, fam, k


def _family_key(fam: str, ss_rank: int) -> str:
    return fam if fam in EXCEPTIONAL else f"{fam}{ss_rank}"


def _split_label(spec: str) -> list[str]:
    toks = re.split(r"[x×]", spec.replace(" ", ""))
    if not toks or any(not t for t in toks):
        raise UnsupportedType(f"malformed type label {spec!r}")
    return toks


def build_root_datum(spec: str) -> BasedRootDatum:
    """Build the datum named by ``spec`` (twist suffixes select a compatible lattice only)."""
    return parse_type(spec)[0]


@lru_cache(maxsize=256)
def parse_type(spec: str) -> tuple[BasedRootDatum, DiagramAutomorphism]:
    """Datum plus the diagram automorphism requested by the ``^k`` suffixes."""
    toks = _split_label(spec)
    rank = 0
    s_roots: list = []
    s_coroots: list = []
    factors = []
    blocks = []  # (offset, rank, simple offset, kind, num, twist, family, ss_rank)
    for tok in toks:
        kind, num, twist = _parse_factor(tok)
        r, sr, sc, fam, ssr = _single_factor(kind, num, twist)
        off = rank
        soff = len(s_roots)
        pad = lambda v: [0] * off + list(v)  # noqa: E731
        s_roots = [list(v) + [0] * r for v in s_roots] + [pad(v) for v in sr]
        s_coroots = [list(v) + [0] * r for v in s_coroots] + [pad(v) for v in sc]
        rank += r
        factors.append(FactorInfo(fam, ssr, (soff, soff + ssr), tok))
        blocks.append((off, r, soff, kind, num, twist, fam, ssr))
    s_roots = [v + [0] * (rank - len(v)) for v in s_roots]
    s_coroots = [v + [0] * (rank - len(v)) for v in s_coroots]
    label = "x".join(toks)
    datum = _make_datum(label, rank, s_roots, s_coroots, factors)

    mat = [[int(i == j) for j in range(rank)] for i in range(rank)]
    perm = list(range(len(s_roots)))
    twists = []
    for off, r, soff, kind, num, twist, fam, ssr in blocks:
        twists.append(twist)
        if twist == 1:
            continue
        block, local_perm = _twist_block(kind, num, twist, fam, ssr, r)
        for i in range(r):
            for j in range(r):
                mat[off + i][off + j] = block[i][j]
        for i, pi in enumerate(local_perm):
            perm[soff + i] = soff + pi
    M = IntMatrix.from_rows(mat, rank)
    beta = DiagramAutomorphism(M, tuple(perm), _matrix_order(M), tuple(twists))
    _check_automorphism(datum, beta)
    return datum, beta


def _twist_block(kind, num, twist, fam, ssr, r):
    """Matrix (on the factor's lattice) and simple-root permutation of a diagram symmetry."""
    if kind == "GL" and twist == 2 and num >= 2:
        n = num
        block = [[-int(i == n - 1 - j) for j in range(n)] for i in range(n)]
        return block, [n - 2 - i for i in range(n - 1)]
    if kind == "SO" and num % 2 == 0 and twist == 2 and num >= 4:
        n = num // 2
        block = [[int(i == j) * (-1 if i == n - 1 else 1) for j in range(n)] for i in range(n)]
        perm = list(range(n))
        perm[n - 2], perm[n - 1] = n - 1, n - 2
        return block, perm
    if kind == "T":
        raise UnsupportedType("a torus has no diagram automorphism; use an explicit Frobenius matrix")
    if kind in ("GL", "SO") and num in (1, 2) and r == 1:
        # GL1 and SO2 are rank-1 tori; the outer twist is inversion
        return [[-1]], []
    perm = _dynkin_symmetry(fam, ssr, twist)
    if perm is None:
        raise UnsupportedType(f"no diagram automorphism of order {twist} for {kind}{num}")
    # root and weight lattice bases are permuted along with the nodes
    block = [[int(perm[j] == i) for j in range(r)] for i in range(r)]
    return block, perm


def _dynkin_symmetry(fam: str, k: int, order: int):
    if order == 2:
        if fam == "A" and k >= 2:
            return [k - 1 - i for i in range(k)]
        if fam == "D" and k >= 3:
            perm = list(range(k))
            perm[k - 2], perm[k - 1] = k - 1, k - 2
            return perm
        if fam == "E6":
            return [5, 1, 4, 3, 2, 0]
    if order == 3 and fam == "D" and k == 4:
        # nodes 1 -> 3 -> 4 -> 1 with the central node 2 fixed
        return [2, 1, 3, 0]
    return None


def _matrix_order(M: IntMatrix, limit: int = 10_000) -> int:
    return M.order(limit)


def _check_automorphism(d: BasedRootDatum, beta: DiagramAutomorphism) -> None:
    M = beta.lattice_matrix
    rows = M.to_rows()
    root_set = set(d.roots)
    simple = d.simple_roots
    for i, a in enumerate(simple):
        img = tuple(sum(rows[r][c] * a[c] for c in range(d.rank)) for r in range(d.rank))
        if img != simple[beta.simple_perm[i]]:
            raise UnsupportedType("diagram automorphism does not permute the simple roots")
    for a in d.roots:
        img = tuple(sum(rows[r][c] * a[c] for c in range(d.rank)) for r in range(d.rank))
        if img not in root_set:
            raise UnsupportedType("diagram automorphism does not preserve the roots")


def trivial_automorphism(d: BasedRootDatum) -> DiagramAutomorphism:
    return DiagramAutomorphism(IntMatrix.identity(d.rank), tuple(range(d.semisimple_rank)), 1,
                               tuple(1 for _ in d.factors))


def automorphism_from_matrix(d: BasedRootDatum, M: IntMatrix) -> DiagramAutomorphism:
    """Wrap a lattice matrix that maps simple roots to simple roots."""
    rows = M.to_rows()
    simple = d.simple_roots
    perm = []
    for a in simple:
        img = tuple(sum(rows[r][c] * a[c] for c in range(d.rank)) for r in range(d.rank))
        if img not in simple:
            raise UnsupportedType("matrix does not permute the simple roots")
        perm.append(simple.index(img))
    beta = DiagramAutomorphism(M, tuple(perm), _matrix_order(M))
    _check_automorphism(d, beta)
    return beta


# ---------------------------------------------------------------------------
# Weyl group

_DEGREES = {
    "G2": [2, 6],
    "F4": [2, 6, 8, 12],
    "E6": [2, 5, 6, 8, 9, 12],
    "E7": [2, 6, 8, 10, 12, 14, 18],
    "E8": [2, 8, 12, 14, 18, 20, 24, 30],
}


def _factor_degrees(fam: str, k: int) -> list[int]:
    if fam == "T" or k == 0:
        return []
    if fam in _DEGREES:
        return list(_DEGREES[fam])
    if fam == "A":
        return list(range(2, k + 2))
    if fam in ("B", "C"):
        return [2 * i for i in range(1, k + 1)]
    if fam == "D":
        return sorted([2 * i for i in range(1, k)] + [k])
    raise UnsupportedType(f"no degree table for family {fam}")


def fundamental_degrees(d: BasedRootDatum) -> list[int]:
    """Degrees of the semisimple factors plus a 1 for each rank of central torus."""
    degs = []
    for f in d.factors:
        degs.extend(_factor_degrees(f.family, f.ss_rank))
    degs.extend([1] * d.central_rank)
    return sorted(degs)


def weyl_order(d: BasedRootDatum) -> int:
    return math.prod(x for x in fundamental_degrees(d))


@lru_cache(maxsize=64)
def weyl_array(d: BasedRootDatum, bound: int = DEFAULT_WEYL_BOUND) -> np.ndarray:
    """All Weyl group elements as an int64 array of shape (|W|, rank, rank), canonical order."""
    expected = weyl_order(d)
    if expected > bound:
        # refuse before spending time and memory on a closure that cannot finish
        raise WeylTooLarge(0, bound)
    r = d.rank
    gens = [np.array(s.to_rows(), dtype=np.int64).reshape(r, r) for s in d.simple_reflections()]
    ident = np.eye(r, dtype=np.int64)
    seen = {ident.tobytes(): ident}
    frontier = ident[None, :, :]
    while len(frontier):
        new = []
        for g in gens:
            prods = frontier @ g
            for m in prods:
                key = m.tobytes()
                if key not in seen:
                    seen[key] = m
                    new.append(m)
                    if len(seen) > bound:
                        raise WeylTooLarge(len(seen), bound)
        frontier = np.array(new, dtype=np.int64).reshape(-1, r, r) if new else np.empty((0, r, r), np.int64)
    arr = np.array(list(seen.values()), dtype=np.int64).reshape(-1, r, r)
    order = np.lexsort(arr.reshape(len(arr), -1).T[::-1])
    return arr[order]


def weyl_elements(d: BasedRootDatum, bound: int = DEFAULT_WEYL_BOUND) -> list[IntMatrix]:
    arr = weyl_array(d, bound)
    r = d.rank
    return [IntMatrix(r, r, tuple(int(x) for x in m.ravel())) for m in arr]


# ---------------------------------------------------------------------------
# characteristic polynomials


def _charpolys_from_traces(traces: np.ndarray, r: int) -> list[IntPoly]:
    """Newton's identities on each distinct row of power traces."""
    out = []
    for row in {tuple(int(x) for x in t) for t in traces}:
        e = [Fraction(1)]
        for k in range(1, r + 1):
            s = sum((-1) ** (i - 1) * e[k - i] * row[i - 1] for i in range(1, k + 1))
            e.append(s / k)
        coeffs = [0] * (r + 1)
        for k in range(r + 1):
            coeffs[r - k] = int((-1) ** k * e[k])
        out.append(IntPoly(coeffs))
    return sorted(out, key=lambda p: p.coeffs)


def twisted_charpolys(d: BasedRootDatum, beta: DiagramAutomorphism,
                      bound: int = DEFAULT_WEYL_BOUND) -> list[IntPoly]:
    """Distinct det(T - w beta^-1 | X) over the Weyl group, canonically ordered."""
    r = d.rank
    if r == 0:
        return [IntPoly.const(1)]
    W = weyl_array(d, bound)
    binv = np.array(beta.inverse_matrix().to_rows(), dtype=np.int64).reshape(r, r)
    M = W @ binv
    traces = np.empty((len(M), r), dtype=np.int64)
    P = M.copy()
    for k in range(r):
        traces[:, k] = np.trace(P, axis1=1, axis2=2)
        if k + 1 < r:
            P = P @ M
    return _charpolys_from_traces(traces, r)


def _central_charpoly(d: BasedRootDatum, beta: DiagramAutomorphism) -> IntPoly:
    """Characteristic polynomial of beta on the Weyl-invariant part of X tensor Q."""
    if d.central_rank == 0:
        return IntPoly.const(1)
    if d.semisimple_rank == 0:
        return beta.lattice_matrix.charpoly()
    K = integer_kernel(IntMatrix.from_rows(d.simple_coroots, d.rank))  # rows span the invariants
    basis = K.to_rows()
    Mrows = beta.lattice_matrix.to_rows()
    images = [[sum(Mrows[i][j] * v[j] for j in range(d.rank)) for i in range(d.rank)] for v in basis]
    # coordinates of each image in the basis
    cols = [_solve_in_span(basis, img) for img in images]
    k = len(basis)
    rows = [[cols[j][i] for j in range(k)] for i in range(k)]
    return charpoly_from_rows(rows)


def _solve_in_span(basis: list[list[int]], v: list[int]) -> list[Fraction]:
    """Coefficients c with sum c_i basis_i = v (basis independent)."""
    k = len(basis)
    n = len(v)
    A = [[Fraction(basis[j][i]) for j in range(k)] + [Fraction(v[i])] for i in range(n)]
    row = 0
    piv_cols = []
    for c in range(k):
        p = next((i for i in range(row, n) if A[i][c] != 0), None)
        if p is None:
            continue
        A[row], A[p] = A[p], A[row]
        inv = 1 / A[row][c]
        A[row] = [x * inv for x in A[row]]
        for i in range(n):
            if i != row and A[i][c] != 0:
                f = A[i][c]
                A[i] = [x - f * y for x, y in zip(A[i], A[row])]
        piv_cols.append(c)
        row += 1
    for i in range(row, n):
        if A[i][k] != 0:
            raise ValueError("vector not in span")
    sol = [Fraction(0)] * k
    for i, c in enumerate(piv_cols):
        sol[c] = A[i][k]
    return sol


def _epsilons(fam: str, k: int, order: int) -> list[tuple[int, IntPoly]]:
    """(degree, factor polynomial) list for a simple factor with a diagram twist."""
    degs = _factor_degrees(fam, k)
    if order == 1:
        return [(d, IntPoly.binomial(d, -1)) for d in degs]
    if order == 2 and fam == "A":
        return [(d, IntPoly.binomial(d, -((-1) ** d))) for d in degs]
    if order == 2 and fam == "D":
        out = [(2 * i, IntPoly.binomial(2 * i, -1)) for i in range(1, k)]
        out.append((k, IntPoly.binomial(k, 1)))
        return out
    if order == 2 and fam == "E6":
        return [(d, IntPoly.binomial(d, 1 if d in (5, 9) else -1)) for d in degs]
    if order == 3 and fam == "D" and k == 4:
        return [(2, IntPoly.binomial(2, -1)), (6, IntPoly.binomial(6, -1)),
                (8, IntPoly((1, 0, 0, 0, 1, 0, 0, 0, 1)))]
    raise NotSupported(f"no twisted table for {fam}{k} with twist order {order}")


def table_available(d: BasedRootDatum, beta: DiagramAutomorphism) -> bool:
    if beta.factor_twists is None and not beta.is_trivial():
        return False
    twists = beta.factor_twists or tuple(1 for _ in d.factors)
    try:
        for f, tw in zip(d.factors, twists):
            if f.family != "T":
                _epsilons(f.family, f.ss_rank, tw)
    except NotSupported:
        return False
    return True


def chi_table(d: BasedRootDatum, beta: DiagramAutomorphism) -> IntPoly:
    if not table_available(d, beta):
        raise NotSupported("no degree table applies to this automorphism")
    twists = beta.factor_twists or tuple(1 for _ in d.factors)
    out = IntPoly.const(1)
    for f, tw in zip(d.factors, twists):
        if f.family == "T":
            continue
        for _, p in _epsilons(f.family, f.ss_rank, tw):
            out = out * p
    return (out * _central_charpoly(d, beta)).primitive()


def chi_oracle(d: BasedRootDatum, beta: DiagramAutomorphism, bound: int = DEFAULT_WEYL_BOUND) -> IntPoly:
    """Springer's description: lcm of det(T - w beta^-1) over the Weyl group."""
    return primitive_lcm(twisted_charpolys(d, beta, bound))


def chi_twisted(d: BasedRootDatum, beta: DiagramAutomorphism | None = None, method: str = "auto",
                bound: int = DEFAULT_WEYL_BOUND) -> IntPoly:
    if beta is None:
        beta = trivial_automorphism(d)
    if method == "oracle":
        return chi_oracle(d, beta, bound)
    if method == "table":
        return chi_table(d, beta)
    if method != "auto":
        raise ValueError(f"unknown method {method!r}")
    if table_available(d, beta):
        chi = chi_table(d, beta)
        if weyl_order(d) <= AUTO_CROSSCHECK_LIMIT:
            other = chi_oracle(d, beta, bound)
            if other != chi:
                raise AssertionError(f"table and oracle disagree for {d.label}: {chi} vs {other}")
        return chi
    return chi_oracle(d, beta, bound)


def twisted_coxeter(chi: IntPoly) -> int:
    """Largest n with Phi_n dividing chi."""
    if chi.degree < 1:
        raise DegenerateChi("constant polynomial has no twisted Coxeter number")
    mult, _ = cyclotomic_factorization(chi)
    if not mult:
        raise DegenerateChi(f"{chi} has no cyclotomic factor")
    return max(mult)


def chi_star_from_h(h: int) -> IntPoly:
    out = IntPoly.const(1)
    for n in range(1, h + 1):
        out = out * cyclotomic(n)
    return out


def chi_star(d: BasedRootDatum, beta: DiagramAutomorphism | None = None, **kw) -> IntPoly:
    return chi_star_from_h(twisted_coxeter(chi_twisted(d, beta, **kw)))


def is_triality_factor(f: FactorInfo, twist: int) -> bool:
    return f.family == "D" and f.ss_rank == 4 and twist == 3


def has_triality(d: BasedRootDatum, beta: DiagramAutomorphism | None) -> bool:
    if beta is None or beta.factor_twists is None:
        return False
    return any(is_triality_factor(f, tw) for f, tw in zip(d.factors, beta.factor_twists))


def chi_prime(d: BasedRootDatum, beta: DiagramAutomorphism | None = None, **kw) -> IntPoly:
    """Triality-corrected chi: each 3D4 factor contributes T^12 - 1 instead of its chi."""
    chi = chi_twisted(d, beta, **kw)
    if not has_triality(d, beta):
        return chi
    for f, tw in zip(d.factors, beta.factor_twists):
        if is_triality_factor(f, tw):
            part = IntPoly.const(1)
            for _, p in _epsilons("D", 4, 3):
                part = part * p
            chi = chi // part * IntPoly.binomial(12, -1)
    return chi
