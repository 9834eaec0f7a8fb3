"""Exact integer polynomials, cyclotomic factors, and integer-lattice algebra.

Everything here works with Python integers and :class:`fractions.Fraction`;
nothing is approximated.  Polynomials are stored densely in ascending degree.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

from .errors import EmptyInput, ZeroInput


def _strip(coeffs: Iterable) -> tuple:
    c = list(coeffs)
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


@dataclass(frozen=True)
class IntPoly:
    """Univariate polynomial with integer coefficients, ``coeffs[i]`` is the T^i term."""

    coeffs: tuple = ()

    def __post_init__(self):
        c = _strip(int(x) for x in self.coeffs)
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def T(cls) -> "IntPoly":
        return cls((0, 1))

    @classmethod
    def const(cls, c: int) -> "IntPoly":
        return cls((c,))

    @classmethod
    def binomial(cls, d: int, c: int) -> "IntPoly":
        """T^d + c."""
        coeffs = [0] * (d + 1)
        coeffs[0] += c
        coeffs[d] += 1
        return cls(coeffs)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def leading(self) -> int:
        return self.coeffs[-1] if self.coeffs else 0

    def is_zero(self) -> bool:
        return not self.coeffs

    def __bool__(self):
        return bool(self.coeffs)

    def __add__(self, other):
        other = _as_poly(other)
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (0,) * (n - len(self.coeffs))
        b = other.coeffs + (0,) * (n - len(other.coeffs))
        return IntPoly(x + y for x, y in zip(a, b))

    __radd__ = __add__

    def __neg__(self):
        return IntPoly(-x for x in self.coeffs)

    def __sub__(self, other):
        return self + (-_as_poly(other))

    def __rsub__(self, other):
        return _as_poly(other) - self

    def __mul__(self, other):
        other = _as_poly(other)
        if not self.coeffs or not other.coeffs:
            return IntPoly()
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, x in enumerate(self.coeffs):
            if x:
                for j, y in enumerate(other.coeffs):
                    out[i + j] += x * y
        return IntPoly(out)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        result = IntPoly.const(1)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def __call__(self, x):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def divmod_exact(self, other: "IntPoly") -> tuple["IntPoly", "IntPoly"]:
        """Division by a polynomial whose leading coefficient is +-1."""
        if abs(other.leading) != 1:
            raise ValueError("divisor must have unit leading coefficient")
        rem = list(self.coeffs)
        d = other.degree
        lc = other.leading
        if len(rem) <= d:
            return IntPoly(), self
        quo = [0] * (len(rem) - d)
        for i in range(len(rem) - 1, d - 1, -1):
            c = rem[i] * lc
            if c:
                quo[i - d] = c
                for j, y in enumerate(other.coeffs):
                    rem[i - d + j] -= c * y
        return IntPoly(quo), IntPoly(rem)

    def __floordiv__(self, other):
        return self.divmod_exact(_as_poly(other))[0]

    def __mod__(self, other):
        return self.divmod_exact(_as_poly(other))[1]

    def substitute_power(self, k: int) -> "IntPoly":
        """p(T^k)."""
        if k == 1 or not self.coeffs:
            return self
        out = [0] * (self.degree * k + 1)
        for i, c in enumerate(self.coeffs):
            out[i * k] = c
        return IntPoly(out)

    def content(self) -> int:
        g = 0
        for c in self.coeffs:
            g = math.gcd(g, c)
        return g

    def primitive(self) -> "IntPoly":
        """Divide out the content and make the leading coefficient positive."""
        if not self.coeffs:
            return self
        g = self.content()
        if self.leading < 0:
            g = -g
        return IntPoly(c // g for c in self.coeffs)

    def to_json(self) -> list[str]:
        return [str(c) for c in self.coeffs]

    @classmethod
    def from_json(cls, data: Sequence) -> "IntPoly":
        return cls(int(c) for c in data)

    def __str__(self):
        if not self.coeffs:
            return "0"
        terms = []
        for i in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[i]
            if not c:
                continue
            sign = "-" if c < 0 else "+"
            a = abs(c)
            if i == 0:
                body = str(a)
            else:
                mono = "T" if i == 1 else f"T^{i}"
                body = mono if a == 1 else f"{a}*{mono}"
            terms.append((sign, body))
        first_sign, first = terms[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, body in terms[1:]:
            out += f" {sign} {body}"
        return out


def _as_poly(x) -> IntPoly:
    if isinstance(x, IntPoly):
        return x
    if isinstance(x, int):
        return IntPoly.const(x)
    raise TypeError(f"cannot coerce {type(x).__name__} to IntPoly")


# ---------------------------------------------------------------------------
# rational polynomial helpers (lists of Fractions, ascending)


def _q_strip(a: list) -> list:
    while a and a[-1] == 0:
        a.pop()
    return a


def _q_divmod(a: list, b: list) -> tuple[list, list]:
    a = _q_strip([Fraction(x) for x in a])
    b = _q_strip([Fraction(x) for x in b])
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    if len(a) < len(b):
        return [], a
    quo = [Fraction(0)] * (len(a) - len(b) + 1)
    inv = 1 / b[-1]
    for i in range(len(a) - len(b), -1, -1):
        c = a[i + len(b) - 1] * inv
        quo[i] = c
        if c:
            for j, y in enumerate(b):
                a[i + j] -= c * y
    return _q_strip(quo), _q_strip(a[: len(b) - 1])


def _q_monic_gcd(a: list, b: list) -> list:
    a = _q_strip([Fraction(x) for x in a])
    b = _q_strip([Fraction(x) for x in b])
    while b:
        _, r = _q_divmod(a, b)
        a, b = b, r
    if not a:
        return a
    lc = a[-1]
    return [x / lc for x in a]


def _q_to_primitive(a: list) -> IntPoly:
    a = _q_strip(list(a))
    if not a:
        return IntPoly()
    den = 1
    for x in a:
        den = den * x.denominator // math.gcd(den, x.denominator)
    return IntPoly(int(x * den) for x in a).primitive()


def divides_over_q(a: IntPoly, b: IntPoly) -> bool:
    """True when a | b in Q[T]."""
    if a.is_zero():
        return b.is_zero()
    _, r = _q_divmod(list(b.coeffs), list(a.coeffs))
    return not r


# ---------------------------------------------------------------------------
# cyclotomic polynomials


def euler_phi(n: int) -> int:
    result = n
    m = n
    p = 2
    while p * p <= m:
        if m % p == 0:
            while m % p == 0:
                m //= p
            result -= result // p
        p += 1
    if m > 1:
        result -= result // m
    return result


@lru_cache(maxsize=None)
def cyclotomic(n: int) -> IntPoly:
    """n-th cyclotomic polynomial, by dividing T^n - 1 by the smaller Phi_d."""
    if n < 1:
        raise ValueError("cyclotomic index must be >= 1")
    p = IntPoly.binomial(n, -1)
    for d in range(1, n):
        if n % d == 0:
            p, r = p.divmod_exact(cyclotomic(d))
            assert r.is_zero()
    return p


def cyclotomic_factorization(p: IntPoly) -> tuple[dict[int, int], IntPoly]:
    """Split off every cyclotomic factor of ``p``.

    Returns ``(mult, rem)`` with ``p == rem * prod(Phi_n ** mult[n])``; ``rem``
    has no factor Phi_n for any n with phi(n) <= deg p.
    """
    if p.is_zero():
        raise ZeroInput("cannot factor the zero polynomial")
    deg = p.degree
    mult: dict[int, int] = {}
    rem = p
    # phi(n) >= sqrt(n/2), so n <= 2*deg^2 covers every phi(n) <= deg
    for n in range(1, 2 * deg * deg + 3):
        if euler_phi(n) > rem.degree:
            continue
        phi_n = cyclotomic(n)
        while rem.degree >= phi_n.degree:
            q, r = rem.divmod_exact(phi_n)
            if not r.is_zero():
                break
            rem = q
            mult[n] = mult.get(n, 0) + 1
    return mult, rem


def format_cyclotomic(mult: dict[int, int], rem: IntPoly | None = None) -> str:
    parts = []
    for n in sorted(mult):
        e = mult[n]
        parts.append(f"Phi{n}" + (f"^{e}" if e > 1 else ""))
    if rem is not None and rem != IntPoly.const(1):
        parts.insert(0, f"({rem})")
    return "*".join(parts) if parts else "1"


def eval_mod(p: IntPoly, a: int, m: int) -> int:
    """p(a) mod m by Horner's rule, reducing at every step."""
    if m < 2:
        raise ValueError("modulus must be >= 2")
    acc = 0
    a %= m
    for c in reversed(p.coeffs):
        acc = (acc * a + c) % m
    return acc


def primitive_lcm(polys: Sequence[IntPoly]) -> IntPoly:
    """Least common multiple over Q, normalised to a primitive integer polynomial."""
    if not polys:
        raise EmptyInput("primitive_lcm needs at least one polynomial")
    acc = [Fraction(1)]
    for p in polys:
        if p.is_zero():
            raise ZeroInput("primitive_lcm inputs must be nonzero")
        b = [Fraction(c) for c in p.coeffs]
        g = _q_monic_gcd(acc, b)
        q, r = _q_divmod(b, g)
        assert not r
        acc = _q_mul(acc, q)
        lc = acc[-1]
        acc = [x / lc for x in acc]
    return _q_to_primitive(acc)


def _q_mul(a: list, b: list) -> list:
    if not a or not b:
        return []
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


# ---------------------------------------------------------------------------
# integer matrices


@dataclass(frozen=True)
class IntMatrix:
    rows: int
    cols: int
    entries: tuple

    def __post_init__(self):
        ent = tuple(int(x) for x in self.entries)
        if len(ent) != self.rows * self.cols:
            raise ValueError(f"expected {self.rows * self.cols} entries, got {len(ent)}")
        object.__setattr__(self, "entries", ent)

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], cols: int | None = None) -> "IntMatrix":
        rows = [list(r) for r in rows]
        if cols is None:
            cols = len(rows[0]) if rows else 0
        return cls(len(rows), cols, tuple(x for r in rows for x in r))

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls(n, n, tuple(int(i == j) for i in range(n) for j in range(n)))

    @classmethod
    def zeros(cls, r: int, c: int) -> "IntMatrix":
        return cls(r, c, (0,) * (r * c))

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i * self.cols + j]

    def to_rows(self) -> list[list[int]]:
        return [list(self.entries[i * self.cols:(i + 1) * self.cols]) for i in range(self.rows)]

    def row(self, i: int) -> tuple:
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def col(self, j: int) -> tuple:
        return self.entries[j::self.cols]

    def transpose(self) -> "IntMatrix":
        return IntMatrix(self.cols, self.rows, tuple(self[i, j] for j in range(self.cols) for i in range(self.rows)))

    @property
    def T(self) -> "IntMatrix":
        return self.transpose()

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise ValueError("shape mismatch")
        a = self.to_rows()
        bt = [other.col(j) for j in range(other.cols)]
        return IntMatrix(self.rows, other.cols,
                         tuple(sum(x * y for x, y in zip(r, c)) for r in a for c in bt))

    def __add__(self, other: "IntMatrix") -> "IntMatrix":
        return IntMatrix(self.rows, self.cols, tuple(x + y for x, y in zip(self.entries, other.entries)))

    def __sub__(self, other: "IntMatrix") -> "IntMatrix":
        return IntMatrix(self.rows, self.cols, tuple(x - y for x, y in zip(self.entries, other.entries)))

    def __neg__(self):
        return IntMatrix(self.rows, self.cols, tuple(-x for x in self.entries))

    def scale(self, c: int) -> "IntMatrix":
        return IntMatrix(self.rows, self.cols, tuple(c * x for x in self.entries))

    def __pow__(self, e: int) -> "IntMatrix":
        if e < 0:
            return self.inverse() ** (-e)
        result = IntMatrix.identity(self.rows)
        base = self
        while e:
            if e & 1:
                result = result @ base
            base = base @ base
            e >>= 1
        return result

    def is_identity(self) -> bool:
        return self == IntMatrix.identity(self.rows) and self.rows == self.cols

    def det(self) -> int:
        """Bareiss fraction-free elimination."""
        n = self.rows
        if n != self.cols:
            raise ValueError("det of non-square matrix")
        if n == 0:
            return 1
        a = self.to_rows()
        sign = 1
        prev = 1
        for k in range(n - 1):
            if a[k][k] == 0:
                for i in range(k + 1, n):
                    if a[i][k] != 0:
                        a[k], a[i] = a[i], a[k]
                        sign = -sign
                        break
                else:
                    return 0
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
            prev = a[k][k]
        return sign * a[n - 1][n - 1]

    def inverse(self) -> "IntMatrix":
        """Inverse of a unimodular matrix."""
        inv = rational_inverse(self.to_rows())
        out = []
        for row in inv:
            for x in row:
                if x.denominator != 1:
                    raise ValueError("matrix is not invertible over Z")
                out.append(int(x))
        return IntMatrix(self.rows, self.cols, tuple(out))

    def charpoly(self) -> IntPoly:
        """det(T*I - self) by the Faddeev-LeVerrier recursion."""
        return charpoly_from_rows(self.to_rows())

    def order(self, limit: int = 10_000) -> int:
        """Multiplicative order, searched up to ``limit``."""
        ident = IntMatrix.identity(self.rows)
        acc = self
        for k in range(1, limit + 1):
            if acc == ident:
                return k
            acc = acc @ self
        raise ValueError(f"matrix has no finite order <= {limit}")

    def to_json(self) -> dict:
        return {"rows": self.rows, "cols": self.cols, "entries": [str(x) for x in self.entries]}

    @classmethod
    def from_json(cls, data: dict) -> "IntMatrix":
        return cls(int(data["rows"]), int(data["cols"]), tuple(int(x) for x in data["entries"]))


def charpoly_from_rows(a: Sequence[Sequence]) -> IntPoly:
    n = len(a)
    if n == 0:
        return IntPoly.const(1)
    A = [[Fraction(x) for x in r] for r in a]
    coeffs = [Fraction(0)] * (n + 1)
    coeffs[n] = Fraction(1)
    M = [[Fraction(0)] * n for _ in range(n)]
    for k in range(1, n + 1):
        # M_k = A*M_{k-1} + c_{n-k+1} I
        if k > 1:
            AM = [[sum(A[i][t] * M[t][j] for t in range(n)) for j in range(n)] for i in range(n)]
        else:
            AM = [[Fraction(0)] * n for _ in range(n)]
        for i in range(n):
            AM[i][i] += coeffs[n - k + 1]
        M = AM
        AMk = [[sum(A[i][t] * M[t][j] for t in range(n)) for j in range(n)] for i in range(n)]
        tr = sum(AMk[i][i] for i in range(n))
        coeffs[n - k] = -tr / k
    return IntPoly(int(c) for c in coeffs)


def rational_inverse(rows: Sequence[Sequence]) -> list[list[Fraction]]:
    n = len(rows)
    a = [[Fraction(x) for x in r] + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(rows)]
    for c in range(n):
        piv = next((r for r in range(c, n) if a[r][c] != 0), None)
        if piv is None:
            raise ValueError("singular matrix")
        a[c], a[piv] = a[piv], a[c]
        inv = 1 / a[c][c]
        a[c] = [x * inv for x in a[c]]
        for r in range(n):
            if r != c and a[r][c] != 0:
                f = a[r][c]
                a[r] = [x - f * y for x, y in zip(a[r], a[c])]
    return [r[n:] for r in a]


def rational_rank(rows: Sequence[Sequence]) -> int:
    a = [[Fraction(x) for x in r] for r in rows]
    if not a:
        return 0
    m, n = len(a), len(a[0])
    rank = 0
    for c in range(n):
        piv = next((r for r in range(rank, m) if a[r][c] != 0), None)
        if piv is None:
            continue
        a[rank], a[piv] = a[piv], a[rank]
        for r in range(rank + 1, m):
            if a[r][c] != 0:
                f = a[r][c] / a[rank][c]
                a[r] = [x - f * y for x, y in zip(a[r], a[rank])]
        rank += 1
    return rank


# ---------------------------------------------------------------------------
# Smith normal form and lattice kernels


def smith_normal_form(M: IntMatrix) -> tuple[IntMatrix, IntMatrix, IntMatrix]:
    """Return ``(U, D, V)`` with ``U @ M @ V == D`` and ``d_i | d_(i+1)``, ``d_i >= 0``."""
    m, n = M.rows, M.cols
    A = M.to_rows()
    U = [[int(i == j) for j in range(m)] for i in range(m)]
    V = [[int(i == j) for j in range(n)] for i in range(n)]

    def swap_rows(i, j):
        A[i], A[j] = A[j], A[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for r in A:
            r[i], r[j] = r[j], r[i]
        for r in V:
            r[i], r[j] = r[j], r[i]

    def add_row(dst, src, c):
        # row_dst += c * row_src
        A[dst] = [x + c * y for x, y in zip(A[dst], A[src])]
        U[dst] = [x + c * y for x, y in zip(U[dst], U[src])]

    def add_col(dst, src, c):
        for r in A:
            r[dst] += c * r[src]
        for r in V:
            r[dst] += c * r[src]

    t = 0
    while t < min(m, n):
        best = None
        for i in range(t, m):
            for j in range(t, n):
                if A[i][j] != 0 and (best is None or abs(A[i][j]) < abs(A[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        while True:
            best = None
            for i in range(t, m):
                for j in range(t, n):
                    if A[i][j] != 0 and (best is None or abs(A[i][j]) < abs(A[best[0]][best[1]])):
                        best = (i, j)
            i, j = best
            swap_rows(t, i)
            swap_cols(t, j)
            p = A[t][t]
            clean = True
            for i in range(t + 1, m):
                if A[i][t]:
                    add_row(i, t, -(A[i][t] // p))
                    if A[i][t]:
                        clean = False
            for j in range(t + 1, n):
                if A[t][j]:
                    add_col(j, t, -(A[t][j] // p))
                    if A[t][j]:
                        clean = False
            if not clean:
                continue
            bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n) if A[i][j] % p), None)
            if bad is None:
                break
            add_row(t, bad[0], 1)
        if A[t][t] < 0:
            A[t] = [-x for x in A[t]]
            U[t] = [-x for x in U[t]]
        t += 1
    return (IntMatrix.from_rows(U, m), IntMatrix.from_rows(A, n), IntMatrix.from_rows(V, n))


def invariant_factors(M: IntMatrix) -> list[int]:
    """Diagonal of the Smith form (length min(rows, cols))."""
    _, D, _ = smith_normal_form(M)
    return [D[i, i] for i in range(min(D.rows, D.cols))]


def hermite_rows(rows: list[list[int]]) -> list[list[int]]:
    """Row-style Hermite normal form; zero rows dropped."""
    A = [list(r) for r in rows]
    if not A:
        return []
    m, n = len(A), len(A[0])
    r = 0
    for c in range(n):
        if r >= m:
            break
        while True:
            nz = [i for i in range(r, m) if A[i][c] != 0]
            if not nz:
                break
            piv = min(nz, key=lambda i: abs(A[i][c]))
            A[r], A[piv] = A[piv], A[r]
            done = True
            for i in range(r + 1, m):
                if A[i][c]:
                    q = A[i][c] // A[r][c]
                    A[i] = [x - q * y for x, y in zip(A[i], A[r])]
                    if A[i][c]:
                        done = False
            if done:
                break
        if r < m and A[r][c] != 0:
            if A[r][c] < 0:
                A[r] = [-x for x in A[r]]
            for i in range(r):
                q = A[i][c] // A[r][c]
                if q:
                    A[i] = [x - q * y for x, y in zip(A[i], A[r])]
            r += 1
    return [row for row in A if any(row)]


def integer_kernel(M: IntMatrix) -> IntMatrix:
    """Basis (as rows) of the saturated lattice {v : M v = 0}, in Hermite form."""
    n = M.cols
    if M.rows == 0:
        return IntMatrix.identity(n)
    _, D, V = smith_normal_form(M)
    rank = sum(1 for i in range(min(D.rows, D.cols)) if D[i, i] != 0)
    basis = [list(V.col(j)) for j in range(rank, n)]
    basis = hermite_rows(basis)
    return IntMatrix.from_rows(basis, n) if basis else IntMatrix(0, n, ())


# ---------------------------------------------------------------------------
# primes

_SMALL_PRIMES = [p for p in range(2, 10_000) if all(p % d for d in range(2, int(p ** 0.5) + 1))]
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71)


def is_prime(n: int) -> bool:
    """Miller-Rabin; the first 13 bases are a proof below 3.3e24."""
    if n < 2:
        return False
    for p in _SMALL_PRIMES[:50]:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _pollard_brent(n: int) -> int:
    if n % 2 == 0:
        return 2
    for c in range(1, 200):
        y, r, q, g = 2, 1, 1, 1
        x = ys = 2
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(128, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += 128
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if g != n:
            return g
    raise ArithmeticError(f"failed to split {n}")


def prime_divisors(n: int) -> list[int]:
    """Ascending list of the distinct primes dividing |n|."""
    if n == 0:
        raise ZeroInput("0 has no finite set of prime divisors")
    n = abs(n)
    found = set()
    for p in _SMALL_PRIMES:
        if p * p > n:
            break
        if n % p == 0:
            found.add(p)
            while n % p == 0:
                n //= p
    stack = [n] if n > 1 else []
    while stack:
        m = stack.pop()
        if m == 1:
            continue
        if is_prime(m):
            found.add(m)
            continue
        d = _pollard_brent(m)
        stack.extend([d, m // d])
    return sorted(found)
