"""Principal sl2-triples, centralisers of principal nilpotents, and the Kostant determinant.

For a principal triple (E, H, F) the centraliser of E has a basis of
H-eigenvectors with weights 2 d_i - 2 (d_i the fundamental degrees).  With
lambda(t) = diag(t^h_i), the operator X -> t^2 lambda(t) beta(X) lambda(t)^-1 - X
on that centraliser has determinant +-chi_beta(t^2), which is checked exactly
over Q and after reduction mod ell.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from .errors import BadInput, NotSupported
from .exactalg import IntPoly, eval_mod
from .fingrp import FiniteField, make_field
from .rootdata import chi_twisted, parse_type

Matrix = tuple  # tuple of row tuples of Fractions

# ---------------------------------------------------------------------------
# rational matrices


def _mat(rows) -> Matrix:
    return tuple(tuple(Fraction(x) for x in r) for r in rows)


def _zeros(n: int) -> list:
    return [[Fraction(0)] * n for _ in range(n)]


def _unit(n: int, i: int, j: int) -> Matrix:
    m = _zeros(n)
    m[i][j] = Fraction(1)
    return _mat(m)


def mat_mul(A: Matrix, B: Matrix) -> Matrix:
    n = len(A)
    return tuple(tuple(sum(A[i][k] * B[k][j] for k in range(n)) for j in range(n)) for i in range(n))


def mat_add(A: Matrix, B: Matrix, c=1) -> Matrix:
    return tuple(tuple(a + c * b for a, b in zip(ra, rb)) for ra, rb in zip(A, B))


def mat_scale(A: Matrix, c) -> Matrix:
    return tuple(tuple(c * a for a in r) for r in A)


def transpose(A: Matrix) -> Matrix:
    return tuple(zip(*A))


def bracket(A: Matrix, B: Matrix) -> Matrix:
    return mat_add(mat_mul(A, B), mat_mul(B, A), -1)


def identity(n: int) -> Matrix:
    return _mat([[int(i == j) for j in range(n)] for i in range(n)])


def _flat(A: Matrix) -> list:
    return [x for r in A for x in r]


def _rref(rows: list[list[Fraction]]) -> tuple[list[list[Fraction]], list[int]]:
    A = [list(r) for r in rows]
    if not A:
        return A, []
    m, n = len(A), len(A[0])
    piv = []
    r = 0
    for c in range(n):
        p = next((i for i in range(r, m) if A[i][c] != 0), None)
        if p is None:
            continue
        A[r], A[p] = A[p], A[r]
        inv = 1 / A[r][c]
        A[r] = [x * inv for x in A[r]]
        for i in range(m):
            if i != r and A[i][c] != 0:
                f = A[i][c]
                A[i] = [x - f * y for x, y in zip(A[i], A[r])]
        piv.append(c)
        r += 1
        if r == m:
            break
    return A[:r], piv


def _kernel(rows: list[list[Fraction]], ncols: int) -> list[list[Fraction]]:
    R, piv = _rref(rows)
    free = [c for c in range(ncols) if c not in piv]
    out = []
    for fcol in free:
        v = [Fraction(0)] * ncols
        v[fcol] = Fraction(1)
        for i, pc in enumerate(piv):
            v[pc] = -R[i][fcol]
        out.append(v)
    return out


def _solve(columns: list[list[Fraction]], target: list[Fraction]) -> list[Fraction]:
    """Coefficients c with sum c_j columns_j = target (must be solvable)."""
    k = len(columns)
    rows = [[col[i] for col in columns] + [target[i]] for i in range(len(target))]
    R, piv = _rref(rows)
    if k in piv:
        raise AssertionError("linear system has no solution")
    c = [Fraction(0)] * k
    for i, pc in enumerate(piv):
        c[pc] = R[i][k]
    return c


def rational_det(A) -> Fraction:
    M = [list(map(Fraction, r)) for r in A]
    n = len(M)
    det = Fraction(1)
    for c in range(n):
        p = next((i for i in range(c, n) if M[i][c] != 0), None)
        if p is None:
            return Fraction(0)
        if p != c:
            M[c], M[p] = M[p], M[c]
            det = -det
        det *= M[c][c]
        for i in range(c + 1, n):
            f = M[i][c] / M[c][c]
            if f:
                M[i] = [x - f * y for x, y in zip(M[i], M[c])]
    return det


# ---------------------------------------------------------------------------
# frames


@dataclass(frozen=True)
class KostantFrame:
    algebra: str
    n: int
    E: Matrix
    H: Matrix
    F: Matrix
    centralizer_basis: tuple
    weights: tuple
    adjoint_label: str
    gl: bool = False
    constraints: tuple = field(default=(), repr=False)

    @property
    def h_diag(self) -> tuple:
        return tuple(int(self.H[i][i]) for i in range(self.n))

    def in_algebra(self, X: Matrix) -> bool:
        v = _flat(X)
        return all(sum(c * x for c, x in zip(row, v)) == 0 for row in self.constraints)


@dataclass(frozen=True)
class PinnedOuter:
    """X -> -J X^T J^-1, an automorphism fixing E and H."""

    J: Matrix
    order: int

    def apply(self, X: Matrix) -> Matrix:
        Jinv = _inverse(self.J)
        return mat_scale(mat_mul(mat_mul(self.J, transpose(X)), Jinv), -1)


def _inverse(A: Matrix) -> Matrix:
    n = len(A)
    rows = [list(A[i]) + [Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    R, piv = _rref(rows)
    if piv[:n] != list(range(n)):
        raise AssertionError("matrix is singular")
    return tuple(tuple(R[i][n:]) for i in range(n))


def _parse_label(label: str) -> tuple[str, int, bool]:
    m = re.fullmatch(r"(sl|gl|sp)(\d+)", label.strip().lower())
    if not m:
        raise NotSupported(f"unsupported algebra {label!r}")
    kind, n = m.group(1), int(m.group(2))
    if kind in ("sl", "gl") and not 2 <= n <= 5:
        raise NotSupported("sl_n frames are available for 2 <= n <= 5")
    if kind == "sp" and n != 4:
        raise NotSupported("only sp4 is available among symplectic algebras")
    return kind, n, kind == "gl"


def _constraints(kind: str, n: int) -> list[list[Fraction]]:
    N = n * n
    if kind == "gl":
        return []
    if kind == "sl":
        return [[Fraction(int(k // n == k % n)) for k in range(N)]]
    # sp: X J + J X^T = 0 with J = [[0, I], [-I, 0]]
    m = n // 2
    J = [[0] * n for _ in range(n)]
    for i in range(m):
        J[i][m + i] = 1
        J[m + i][i] = -1
    rows = []
    for i in range(n):
        for j in range(n):
            row = [Fraction(0)] * N
            for t in range(n):
                row[i * n + t] += J[t][j]
                row[j * n + t] += J[i][t]
            rows.append(row)
    return rows


@lru_cache(maxsize=None)
def principal_triple(label: str) -> KostantFrame:
    """Principal triple and centraliser data for sl_n (n <= 5), gl_n and sp4."""
    kind, n, gl = _parse_label(label)
    if kind in ("sl", "gl"):
        E = _mat([[int(j == i + 1) for j in range(n)] for i in range(n)])
        H = _mat([[n - 1 - 2 * i if i == j else 0 for j in range(n)] for i in range(n)])
        adjoint = f"A{n - 1}"
    else:
        # simple root vectors of e1 - e2 and 2 e2 in the [[A, B], [C, -A^T]] realisation
        E = mat_add(mat_add(_unit(4, 0, 1), _unit(4, 3, 2), -1), _unit(4, 1, 3))
        H = _mat([[(3, 1, -3, -1)[i] if i == j else 0 for j in range(4)] for i in range(4)])
        adjoint = "C2"
    cons = _constraints(kind, n)
    h = [int(H[i][i]) for i in range(n)]
    # F is the unique weight -2 solution of [E, F] = H
    cells = [(i, j) for i in range(n) for j in range(n) if h[i] - h[j] == -2]
    cols = [_flat(bracket(E, _unit(n, i, j))) for i, j in cells]
    coeffs = _solve(cols, _flat(H))
    F = _zeros(n)
    for (i, j), c in zip(cells, coeffs):
        F[i][j] = c
    F = _mat(F)
    basis = _centralizer(E, h, n, cons)
    weights = tuple(_weight_of(X, h) for X in basis)
    order = sorted(range(len(basis)), key=lambda k: weights[k])
    frame = KostantFrame(label.lower(), n, E, H, F, tuple(basis[k] for k in order),
                         tuple(weights[k] for k in order), adjoint, gl, tuple(tuple(r) for r in cons))
    _check_frame(frame)
    return frame


def _weight_of(X: Matrix, h: list[int]) -> int:
    ws = {h[i] - h[j] for i in range(len(h)) for j in range(len(h)) if X[i][j] != 0}
    if len(ws) != 1:
        raise AssertionError("centraliser element is not an H-eigenvector")
    return ws.pop()


def _centralizer(E: Matrix, h: list[int], n: int, cons: list) -> list[Matrix]:
    """Weight-homogeneous basis of {X in the algebra : [X, E] = 0}."""
    out = []
    for w in sorted({h[i] - h[j] for i in range(n) for j in range(n)}):
        cells = [(i, j) for i in range(n) for j in range(n) if h[i] - h[j] == w]
        units = [_unit(n, i, j) for i, j in cells]
        rows = []
        # [X, E] = 0 and algebra constraints, in the coordinates of the cells
        brs = [_flat(bracket(U, E)) for U in units]
        for k in range(n * n):
            rows.append([b[k] for b in brs])
        for c in cons:
            rows.append([c[i * n + j] for i, j in cells])
        for v in _kernel(rows, len(cells)):
            X = _zeros(n)
            for (i, j), c in zip(cells, v):
                X[i][j] = c
            out.append(_mat(X))
    return out


def _check_frame(fr: KostantFrame) -> None:
    E, H, F = fr.E, fr.H, fr.F
    assert bracket(H, E) == mat_scale(E, 2)
    assert bracket(H, F) == mat_scale(F, -2)
    assert bracket(E, F) == H
    for X in (E, H, F):
        assert fr.in_algebra(X)
    assert all(w >= 0 and w % 2 == 0 for w in fr.weights)


def outer_automorphism(frame: KostantFrame) -> PinnedOuter:
    """The pinned outer automorphism of sl_n / gl_n (n >= 3)."""
    if frame.algebra.startswith("sp") or frame.n < 3:
        raise NotSupported(f"{frame.algebra} has no pinned outer automorphism")
    n = frame.n
    J = _mat([[(-1) ** i if j == n - 1 - i else 0 for j in range(n)] for i in range(n)])
    beta = PinnedOuter(J, 2)
    if beta.apply(frame.E) != frame.E:
        beta = PinnedOuter(mat_scale(J, -1), 2)
    assert beta.apply(frame.E) == frame.E and beta.apply(frame.H) == frame.H
    return beta


def _operator_parts(frame: KostantFrame, beta: PinnedOuter | None) -> tuple[list[list[Fraction]], list[int]]:
    """beta on the centraliser basis (columns are images) and the H-weights of the basis.

    The operator X -> t^2 lambda(t) beta(X) lambda(t)^-1 - X then has entries
    t^(w_i + 2) B[i][j] - delta_ij, since beta preserves weights.
    """
    basis, weights = list(frame.centralizer_basis), list(frame.weights)
    k = len(basis)
    if beta is None:
        return [[Fraction(int(i == j)) for j in range(k)] for i in range(k)], weights
    cols = [_solve([_flat(b) for b in basis], _flat(beta.apply(X))) for X in basis]
    return [[cols[j][i] for j in range(k)] for i in range(k)], weights


def chi_for(frame: KostantFrame, beta: PinnedOuter | None) -> IntPoly:
    if frame.gl:
        label = f"GL{frame.n}"
    else:
        label = frame.adjoint_label
    if beta is not None:
        label += "^2"
    d, b = parse_type(label)
    return chi_twisted(d, b)


@dataclass(frozen=True)
class KostantReport:
    algebra: str
    beta_order: int
    t: Fraction
    det: Fraction
    chi_at_t2: int
    sign: int

    def to_json(self) -> dict:
        return {"algebra": self.algebra, "beta_order": str(self.beta_order), "t": str(self.t),
                "det": str(self.det), "chi_at_t2": str(self.chi_at_t2), "sign": str(self.sign)}


def kostant_determinant(frame: KostantFrame, beta: PinnedOuter | None, t) -> KostantReport:
    """Exact determinant, asserted to be +-chi_beta(t^2)."""
    t = Fraction(t)
    if t == 0:
        raise BadInput("t must be nonzero")
    B, weights = _operator_parts(frame, beta)
    k = len(B)
    det = rational_det([[t ** (weights[i] + 2) * B[i][j] - int(i == j) for j in range(k)] for i in range(k)])
    chi_val = chi_for(frame, beta)(t * t)
    if det == chi_val:
        sign = 1
    elif det == -chi_val:
        sign = -1
    else:
        raise AssertionError(f"determinant {det} is not +-chi(t^2) = {chi_val}")
    return KostantReport(frame.algebra, 1 if beta is None else beta.order, t, det, chi_val, sign)


def regular_unipotent_check(frame: KostantFrame, field: FiniteField, q: int,
                            beta: PinnedOuter | None = None) -> bool:
    """Whether det(q Ad_lambda(sqrt q) beta - id) is nonzero on the centraliser mod ell.

    The answer is asserted to agree with chi(q) != 0 mod ell.
    """
    F = field
    r = F.sqrt(F.from_int(q))
    if r is None:
        F = make_field(field.ell, 2 * field.k)
        r = F.sqrt(F.from_int(q))
    ell = F.ell

    def reduce(x: Fraction) -> int:
        x = Fraction(x)
        if x.denominator % ell == 0:
            raise AssertionError("denominator divisible by ell")
        return F.mul(F.from_int(x.numerator), F.inv(F.from_int(x.denominator)))

    B, weights = _operator_parts(frame, beta)
    k = len(B)
    M = [[F.sub(F.mul(F.power(r, weights[i] + 2), reduce(B[i][j])), int(i == j)) for j in range(k)]
         for i in range(k)]
    nonzero = _det_mod(F, M) != 0
    expected = eval_mod(chi_for(frame, beta), q, ell) != 0
    if nonzero != expected:
        raise AssertionError("mod-ell determinant disagrees with chi(q) mod ell")
    return nonzero


def _det_mod(F: FiniteField, M: list[list[int]]) -> int:
    A = [list(r) for r in M]
    n = len(A)
    det = 1
    for c in range(n):
        p = next((i for i in range(c, n) if A[i][c] != 0), None)
        if p is None:
            return 0
        if p != c:
            A[c], A[p] = A[p], A[c]
            det = F.neg(det)
        det = F.mul(det, A[c][c])
        inv = F.inv(A[c][c])
        for i in range(c + 1, n):
            if A[i][c]:
                f = F.mul(A[i][c], inv)
                A[i] = [F.sub(x, F.mul(f, y)) for x, y in zip(A[i], A[c])]
    return det
