"""Finite fields, small matrix groups over them, element orders and Jordan decomposition.

Field elements are integers ``0 .. ell**k - 1``: the element
``c_0 + c_1 x + ... + c_{k-1} x^{k-1}`` has index ``sum c_i ell**i``.  Matrices
are tuples of such indices in row-major order, and the canonical order on
matrices is lexicographic on that tuple.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .errors import BadInput, GroupTooLarge, NotPrime, NotSupported
from .exactalg import is_prime, prime_divisors

MAX_FIELD_SIZE = 4096
DEFAULT_GROUP_BOUND = 1_000_000


# ---------------------------------------------------------------------------
# polynomials over F_ell (lists, ascending)


def _pmod(a: list, m: list, ell: int) -> list:
    a = [x % ell for x in a]
    dm = len(m) - 1
    inv = pow(m[-1], -1, ell)
    while len(a) - 1 >= dm and any(a):
        while a and a[-1] == 0:
            a.pop()
        if len(a) - 1 < dm:
            break
        c = a[-1] * inv % ell
        shift = len(a) - 1 - dm
        for i, y in enumerate(m):
            a[shift + i] = (a[shift + i] - c * y) % ell
        while a and a[-1] == 0:
            a.pop()
    return a


def _pmul(a: list, b: list, ell: int) -> list:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % ell
    return out


def _pgcd(a: list, b: list, ell: int) -> list:
    a = _strip_mod(a, ell)
    b = _strip_mod(b, ell)
    while b:
        a, b = b, _pmod(a, b, ell)
    return a


def _strip_mod(a: list, ell: int) -> list:
    a = [x % ell for x in a]
    while a and a[-1] == 0:
        a.pop()
    return a


def _xpow_mod(e: int, m: list, ell: int) -> list:
    result = [1]
    base = [0, 1]
    while e:
        if e & 1:
            result = _pmod(_pmul(result, base, ell), m, ell)
        base = _pmod(_pmul(base, base, ell), m, ell)
        e >>= 1
    return result


def is_irreducible(modulus: Sequence[int], ell: int) -> bool:
    """gcd(x^(ell^i) - x, f) = 1 for 0 < i < k, and x^(ell^k) = x mod f."""
    m = list(modulus)
    k = len(m) - 1
    if k == 1:
        return True
    for i in range(1, k):
        xp = _xpow_mod(ell ** i, m, ell)
        diff = list(xp) + [0] * max(0, 2 - len(xp))
        diff[1] = (diff[1] - 1) % ell
        g = _pgcd(m, diff, ell)
        if len(g) > 1:
            return False
    xp = _xpow_mod(ell ** k, m, ell)
    return _strip_mod(xp, ell) == [0, 1]


# ---------------------------------------------------------------------------
# fields


class FiniteField:
    """F_{ell^k} with scalar operations through log/exp tables.

    Use :func:`make_field` to construct; instances are cached so equal
    fields are identical objects.
    """

    def __init__(self, ell: int, k: int, modulus: tuple):
        self.ell = ell
        self.k = k
        self.modulus = modulus
        self.size = ell ** k
        self._digits = [self._to_digits(i) for i in range(self.size)]
        self._build_log_tables()
        self._tables = None

    # representation helpers
    def _to_digits(self, i: int) -> list:
        out = []
        for _ in range(self.k):
            out.append(i % self.ell)
            i //= self.ell
        return out

    def from_digits(self, digits: Sequence[int]) -> int:
        out = 0
        for d in reversed(list(digits)[: self.k]):
            out = out * self.ell + d % self.ell
        return out

    def digits(self, a: int) -> list:
        return list(self._digits[a])

    def _build_log_tables(self):
        n = self.size - 1
        m = list(self.modulus)
        self.generator, self.exp = 1, [1]
        for cand in range(2, self.size):
            gpoly = self._digits[cand]
            seq = [1]
            cur = [1]
            for _ in range(1, n):
                cur = _pmod(_pmul(cur, gpoly, self.ell), m, self.ell)
                idx = self.from_digits(cur + [0] * self.k)
                if idx == 1:
                    break
                seq.append(idx)
            if len(seq) == n:
                self.generator, self.exp = cand, seq
                break
        self.log = [None] * self.size
        for i, v in enumerate(self.exp):
            self.log[v] = i

    def __repr__(self):
        return f"FiniteField({self.ell}, {self.k}, modulus={list(self.modulus)})"

    def __reduce__(self):
        return (make_field, (self.ell, self.k))

    @property
    def zero(self) -> int:
        return 0

    @property
    def one(self) -> int:
        return 1

    def elements(self) -> range:
        return range(self.size)

    # scalar arithmetic
    def add(self, a: int, b: int) -> int:
        if self.k == 1:
            return (a + b) % self.ell
        da, db = self._digits[a], self._digits[b]
        return self.from_digits([x + y for x, y in zip(da, db)])

    def neg(self, a: int) -> int:
        if self.k == 1:
            return (-a) % self.ell
        return self.from_digits([-x for x in self._digits[a]])

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        if self.k == 1:
            return a * b % self.ell
        return self.exp[(self.log[a] + self.log[b]) % (self.size - 1)]

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of zero in a finite field")
        if self.k == 1:
            return pow(a, -1, self.ell)
        return self.exp[(-self.log[a]) % (self.size - 1)]

    def power(self, a: int, e: int) -> int:
        if a == 0:
            if e < 0:
                raise ZeroDivisionError("negative power of zero")
            return 1 if e == 0 else 0
        return self.exp[(self.log[a] * e) % (self.size - 1)]

    def from_int(self, n: int) -> int:
        """Image of an integer under Z -> F."""
        return n % self.ell

    def frobenius(self, a: int, times: int = 1) -> int:
        return self.power(a, self.ell ** times)

    def mult_order(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("zero has no multiplicative order")
        n = self.size - 1
        return n // math.gcd(n, self.log[a])

    def sqrt(self, a: int) -> int | None:
        """Smallest-index square root of a, or None."""
        for x in range(self.size):
            if self.mul(x, x) == a:
                return x
        return None

    # vectorised arithmetic on numpy index arrays
    def tables(self):
        if self._tables is None:
            s = self.size
            idx = np.arange(s)
            if self.k == 1:
                add = (idx[:, None] + idx[None, :]) % s
                mul = (idx[:, None] * idx[None, :]) % s
            else:
                dig = np.array(self._digits, dtype=np.int64)
                pw = self.ell ** np.arange(self.k)
                add = ((dig[:, None, :] + dig[None, :, :]) % self.ell) @ pw
                logs = np.array([0 if v is None else v for v in self.log], dtype=np.int64)
                exp = np.array(self.exp, dtype=np.int64)
                mul = exp[(logs[:, None] + logs[None, :]) % (s - 1)]
                mul[0, :] = 0
                mul[:, 0] = 0
            neg = np.array([self.neg(a) for a in range(s)], dtype=np.int64)
            dtype = np.int16 if s <= 32767 else np.int32
            self._tables = (add.astype(dtype), mul.astype(dtype), neg)
        return self._tables

    def add_arr(self, a, b):
        if self.k == 1:
            return (np.asarray(a) + np.asarray(b)) % self.ell
        return self.tables()[0][a, b]

    def mul_arr(self, a, b):
        if self.k == 1:
            return (np.asarray(a) * np.asarray(b)) % self.ell
        return self.tables()[1][a, b]

    def neg_arr(self, a):
        if self.k == 1:
            return (-np.asarray(a)) % self.ell
        return self.tables()[2][a]

    def matmul_arr(self, A, B):
        """Batched matrix product of index arrays (broadcasting over leading axes)."""
        A = np.asarray(A, dtype=np.int64)
        B = np.asarray(B, dtype=np.int64)
        if self.k == 1:
            return (A @ B) % self.ell
        n = A.shape[-1]
        acc = self.mul_arr(A[..., :, 0, None], B[..., None, 0, :]).astype(np.int64)
        for t in range(1, n):
            acc = self.add_arr(acc, self.mul_arr(A[..., :, t, None], B[..., None, t, :])).astype(np.int64)
        return acc

    def dot_arr(self, V, w):
        """V (N, n) times fixed vector w (n,) -> (N,)."""
        V = np.asarray(V, dtype=np.int64)
        acc = np.zeros(V.shape[0], dtype=np.int64)
        for j, c in enumerate(w):
            if c:
                acc = self.add_arr(acc, self.mul_arr(V[:, j], c)).astype(np.int64)
        return acc

    def frob_arr(self, a, times: int = 1):
        a = np.asarray(a, dtype=np.int64)
        table = np.array([self.frobenius(x, times) for x in range(self.size)], dtype=np.int64)
        return table[a]


def make_field(ell: int, k: int = 1) -> FiniteField:
    # normalise the arguments so make_field(3) and make_field(3, 1) share one cache entry
    return _make_field(int(ell), int(k))


@lru_cache(maxsize=None)
def _make_field(ell: int, k: int) -> FiniteField:
    if not is_prime(ell):
        raise NotPrime(f"{ell} is not prime")
    if k < 1 or ell ** k > MAX_FIELD_SIZE:
        raise BadInput(f"F_{ell}^{k} outside the supported range (size <= {MAX_FIELD_SIZE})")
    if k == 1:
        return FiniteField(ell, 1, (0, 1))
    # coefficients c_0..c_{k-1} scanned lexicographically, c_0 most significant
    for coeffs in itertools.product(range(ell), repeat=k):
        m = tuple(coeffs) + (1,)
        if coeffs[0] != 0 and is_irreducible(m, ell):
            return FiniteField(ell, k, m)
    raise AssertionError("no irreducible polynomial found")


@lru_cache(maxsize=None)
def field_embedding(small: FiniteField, big: FiniteField) -> tuple:
    """Index map of a field embedding small -> big (k_small must divide k_big)."""
    if small.ell != big.ell or big.k % small.k:
        raise BadInput("no embedding between these fields")
    if small.k == 1:
        return tuple(range(small.size))
    # image of x: smallest root in `big` of the small modulus
    m = small.modulus
    root = None
    for y in range(big.size):
        acc = 0
        for c in reversed(m):
            acc = big.add(big.mul(acc, y), big.from_int(c))
        if acc == 0:
            root = y
            break
    out = []
    for a in range(small.size):
        acc = 0
        for c in reversed(small.digits(a)):
            acc = big.add(big.mul(acc, root), big.from_int(c))
        out.append(acc)
    return tuple(out)


# ---------------------------------------------------------------------------
# matrices


@dataclass(frozen=True)
class FqMatrix:
    n: int
    field: FiniteField
    entries: tuple

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(int(x) for x in self.entries))
        if len(self.entries) != self.n * self.n:
            raise BadInput("wrong number of entries")

    def __hash__(self):
        return hash((self.n, self.field.ell, self.field.k, self.entries))

    def __eq__(self, other):
        return (isinstance(other, FqMatrix) and self.n == other.n and self.field is other.field
                and self.entries == other.entries)

    def __lt__(self, other):
        return self.entries < other.entries

    @classmethod
    def identity(cls, n: int, F: FiniteField) -> "FqMatrix":
        return cls(n, F, tuple(int(i == j) for i in range(n) for j in range(n)))

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], F: FiniteField) -> "FqMatrix":
        return cls(len(rows), F, tuple(x for r in rows for x in r))

    @classmethod
    def diag(cls, values: Sequence[int], F: FiniteField) -> "FqMatrix":
        n = len(values)
        return cls(n, F, tuple(values[i] if i == j else 0 for i in range(n) for j in range(n)))

    @classmethod
    def from_ints(cls, rows: Sequence[Sequence[int]], F: FiniteField) -> "FqMatrix":
        """Rows of ordinary integers reduced into the prime field."""
        return cls(len(rows), F, tuple(F.from_int(x) for r in rows for x in r))

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i * self.n + j]

    def rows(self) -> list[list[int]]:
        n = self.n
        return [list(self.entries[i * n:(i + 1) * n]) for i in range(n)]

    def array(self) -> np.ndarray:
        return np.array(self.entries, dtype=np.int64).reshape(self.n, self.n)

    @classmethod
    def from_array(cls, arr, F: FiniteField) -> "FqMatrix":
        arr = np.asarray(arr)
        return cls(arr.shape[0], F, tuple(int(x) for x in arr.ravel()))

    def __matmul__(self, other: "FqMatrix") -> "FqMatrix":
        F = self.field
        n = self.n
        a, b = self.rows(), other.rows()
        out = []
        for i in range(n):
            for j in range(n):
                acc = 0
                for t in range(n):
                    if a[i][t] and b[t][j]:
                        acc = F.add(acc, F.mul(a[i][t], b[t][j]))
                out.append(acc)
        return FqMatrix(n, F, tuple(out))

    def __add__(self, other):
        F = self.field
        return FqMatrix(self.n, F, tuple(F.add(x, y) for x, y in zip(self.entries, other.entries)))

    def __sub__(self, other):
        F = self.field
        return FqMatrix(self.n, F, tuple(F.sub(x, y) for x, y in zip(self.entries, other.entries)))

    def scale(self, c: int) -> "FqMatrix":
        F = self.field
        return FqMatrix(self.n, F, tuple(F.mul(c, x) for x in self.entries))

    def transpose(self) -> "FqMatrix":
        n = self.n
        return FqMatrix(n, self.field, tuple(self.entries[j * n + i] for i in range(n) for j in range(n)))

    def frobenius(self, times: int = 1) -> "FqMatrix":
        F = self.field
        return FqMatrix(self.n, F, tuple(F.frobenius(x, times) for x in self.entries))

    def is_identity(self) -> bool:
        n = self.n
        return all(self.entries[i * n + j] == int(i == j) for i in range(n) for j in range(n))

    def det(self) -> int:
        F = self.field
        a = self.rows()
        n = self.n
        d = 1
        for c in range(n):
            p = next((r for r in range(c, n) if a[r][c]), None)
            if p is None:
                return 0
            if p != c:
                a[c], a[p] = a[p], a[c]
                d = F.neg(d)
            d = F.mul(d, a[c][c])
            inv = F.inv(a[c][c])
            for r in range(c + 1, n):
                if a[r][c]:
                    f = F.mul(a[r][c], inv)
                    a[r] = [F.sub(x, F.mul(f, y)) for x, y in zip(a[r], a[c])]
        return d

    def inverse(self) -> "FqMatrix":
        F = self.field
        n = self.n
        a = [r + [int(i == j) for j in range(n)] for i, r in enumerate(self.rows())]
        for c in range(n):
            p = next((r for r in range(c, n) if a[r][c]), None)
            if p is None:
                raise ZeroDivisionError("singular matrix")
            a[c], a[p] = a[p], a[c]
            inv = F.inv(a[c][c])
            a[c] = [F.mul(inv, x) for x in a[c]]
            for r in range(n):
                if r != c and a[r][c]:
                    f = a[r][c]
                    a[r] = [F.sub(x, F.mul(f, y)) for x, y in zip(a[r], a[c])]
        return FqMatrix(n, F, tuple(x for r in a for x in r[n:]))

    def __pow__(self, e: int) -> "FqMatrix":
        if e < 0:
            return self.inverse() ** (-e)
        result = FqMatrix.identity(self.n, self.field)
        base = self
        while e:
            if e & 1:
                result = result @ base
            base = base @ base
            e >>= 1
        return result

    def to_json(self) -> dict:
        return {"n": str(self.n), "ell": str(self.field.ell), "k": str(self.field.k),
                "entries": [str(x) for x in self.entries]}

    @classmethod
    def from_json(cls, data: dict) -> "FqMatrix":
        F = make_field(int(data["ell"]), int(data["k"]))
        return cls(int(data["n"]), F, tuple(int(x) for x in data["entries"]))


def embed_matrix(g: FqMatrix, big: FiniteField) -> FqMatrix:
    emb = field_embedding(g.field, big)
    return FqMatrix(g.n, big, tuple(emb[x] for x in g.entries))


# ---------------------------------------------------------------------------
# groups

KINDS = ("GL", "SL", "Sp", "T", "U")


@dataclass(frozen=True)
class GroupSpecFin:
    """A classical matrix group over a finite field.

    ``GL``, ``SL``, ``Sp`` (form ``J = [[0, I], [-I, 0]]``), ``T`` (diagonal
    split torus) and ``U`` (unitary group of the antidiagonal hermitian form;
    the field must have square size q0^2 and conjugation is x -> x^q0).
    """

    kind: str
    n: int
    field: FiniteField

    def __post_init__(self):
        if self.kind not in KINDS:
            raise NotSupported(f"group kind {self.kind!r} not supported")
        if self.n < 1:
            raise BadInput("matrix size must be >= 1")
        if self.kind == "Sp" and self.n % 2:
            raise BadInput("Sp needs even n")
        if self.kind == "U" and self.field.k % 2:
            raise BadInput("U needs a field of square order")

    def __hash__(self):
        return hash((self.kind, self.n, self.field.ell, self.field.k))

    @property
    def q(self) -> int:
        return self.field.size

    def form(self) -> FqMatrix | None:
        F = self.field
        n = self.n
        if self.kind == "Sp":
            m = n // 2
            rows = [[0] * n for _ in range(n)]
            for i in range(m):
                rows[i][m + i] = 1
                rows[m + i][i] = F.neg(1)
            return FqMatrix.from_rows(rows, F)
        if self.kind == "U":
            return FqMatrix.from_rows([[int(j == n - 1 - i) for j in range(n)] for i in range(n)], F)
        return None

    def conj_power(self) -> int:
        """Exponent of the Frobenius twist used by the hermitian form (U only)."""
        return self.field.k // 2

    def contains(self, g: FqMatrix) -> bool:
        if g.n != self.n or g.field is not self.field:
            return False
        d = g.det()
        if d == 0:
            return False
        if self.kind == "SL":
            return d == 1
        if self.kind == "T":
            return all(g[i, j] == 0 for i in range(self.n) for j in range(self.n) if i != j)
        if self.kind == "Sp":
            J = self.form()
            return g @ J @ g.transpose() == J
        if self.kind == "U":
            J = self.form()
            return g @ J @ g.frobenius(self.conj_power()).transpose() == J
        return True

    def label(self) -> str:
        return f"{self.kind}{self.n}(F_{self.field.size})"

    def to_json(self) -> dict:
        return {"kind": self.kind, "n": str(self.n), "ell": str(self.field.ell), "k": str(self.field.k)}


def group_order_estimate(spec: GroupSpecFin) -> int:
    """Order predicted by the Chevalley-Steinberg formula."""
    from .dualgroup import ArithContext, chevalley_steinberg, lgroup_from_label

    q = spec.field.size
    if spec.kind == "T":
        return (q - 1) ** spec.n
    if spec.kind == "U":
        q0 = spec.field.ell ** (spec.field.k // 2)
        label = f"GL{spec.n}^2" if spec.n > 1 else "GL1^2"
        return chevalley_steinberg(lgroup_from_label(label, ArithContext.from_q(q0)), q0)
    if spec.kind == "SL" and spec.n == 1:
        return 1
    label = {"GL": f"GL{spec.n}", "SL": f"SL{spec.n}", "Sp": f"Sp{spec.n}"}[spec.kind]
    return chevalley_steinberg(lgroup_from_label(label, ArithContext.from_q(q)), q)


def _all_vectors(F: FiniteField, n: int) -> np.ndarray:
    """All vectors of F^n in lexicographic order (first coordinate most significant)."""
    grids = np.array(list(itertools.product(range(F.size), repeat=n)), dtype=np.int64)
    return grids.reshape(-1, n)


def _vec_index(F: FiniteField, v: Iterable[int]) -> int:
    out = 0
    for x in v:
        out = out * F.size + int(x)
    return out


def _span_mask(F: FiniteField, rows: list, V: np.ndarray) -> np.ndarray:
    mask = np.zeros(len(V), dtype=bool)
    if not rows:
        mask[0] = True
        return mask
    R = np.array(rows, dtype=np.int64)
    coeffs = np.array(list(itertools.product(range(F.size), repeat=len(rows))), dtype=np.int64)
    combos = F.matmul_arr(coeffs[:, None, :], R[None, :, :])[:, 0, :]
    n = R.shape[1]
    idx = np.zeros(len(combos), dtype=np.int64)
    for j in range(n):
        idx = idx * F.size + combos[:, j]
    mask[idx] = True
    return mask


def _form_values(F: FiniteField, V: np.ndarray, row: Sequence[int], J: np.ndarray, conj: int) -> np.ndarray:
    """<row, v> = row J v'^T for every candidate v, v' = v or its Frobenius conjugate."""
    rJ = F.matmul_arr(np.array(row, dtype=np.int64)[None, :], J)[0]
    W = F.frob_arr(V, conj) if conj else V
    return F.dot_arr(W, rJ)


def _cofactor_row(F: FiniteField, rows: list, n: int) -> list:
    """c_j with det([rows; v]) = sum_j v_j c_j."""
    out = []
    for j in range(n):
        minor = [[r[c] for c in range(n) if c != j] for r in rows]
        d = FqMatrix.from_rows(minor, F).det() if minor else 1
        if (n - 1 + j) % 2:
            d = F.neg(d)
        out.append(d)
    return out


@lru_cache(maxsize=32)
def group_array(spec: GroupSpecFin, bound: int = DEFAULT_GROUP_BOUND) -> np.ndarray:
    """All group elements as an index array of shape (|G|, n, n), canonical order."""
    est = group_order_estimate(spec)
    if est > bound:
        raise GroupTooLarge(est, bound)
    F = spec.field
    n = spec.n
    if spec.kind == "T":
        units = list(range(1, F.size))
        out = np.zeros(((F.size - 1) ** n, n, n), dtype=np.int64)
        for idx, diag in enumerate(itertools.product(units, repeat=n)):
            for i, x in enumerate(diag):
                out[idx, i, i] = x
        return _canonical(out)
    V = _all_vectors(F, n)
    J = spec.form()
    Jarr = J.array() if J is not None else None
    conj = spec.conj_power() if spec.kind == "U" else 0
    results: list[np.ndarray] = []

    def candidates(prefix: list) -> np.ndarray:
        i = len(prefix)
        keep = ~_span_mask(F, prefix, V)
        if Jarr is not None:
            for j, r in enumerate(prefix):
                vals = _form_values(F, V, r, Jarr, conj)
                keep &= vals == J[j, i]
            # the diagonal condition <v, v> = J_ii
            W = F.frob_arr(V, conj) if conj else V
            diag = np.zeros(len(V), dtype=np.int64)
            VJ = F.matmul_arr(V[:, None, :], Jarr[None, :, :])[:, 0, :]
            for t in range(n):
                diag = F.add_arr(diag, F.mul_arr(VJ[:, t], W[:, t])).astype(np.int64)
            keep &= diag == J[i, i]
        if spec.kind == "SL" and i == n - 1:
            cof = _cofactor_row(F, prefix, n)
            keep &= F.dot_arr(V, cof) == 1
        return V[keep]

    def dfs(prefix: list):
        if len(prefix) == n - 1:
            last = candidates(prefix)
            if len(last):
                block = np.empty((len(last), n, n), dtype=np.int64)
                if prefix:
                    block[:, : n - 1, :] = np.array(prefix, dtype=np.int64)[None, :, :]
                block[:, n - 1, :] = last
                results.append(block)
            return
        for v in candidates(prefix):
            dfs(prefix + [list(v)])

    dfs([])
    arr = np.concatenate(results) if results else np.empty((0, n, n), dtype=np.int64)
    if spec.kind == "SL" and n == 1:
        arr = np.array([[[1]]], dtype=np.int64)
    return arr


def _canonical(arr: np.ndarray) -> np.ndarray:
    flat = arr.reshape(len(arr), -1)
    order = np.lexsort(flat.T[::-1])
    return arr[order]


def enumerate_group(spec: GroupSpecFin, bound: int = DEFAULT_GROUP_BOUND) -> list[FqMatrix]:
    arr = group_array(spec, bound)
    return [FqMatrix.from_array(m, spec.field) for m in arr]


def matrix_keys(F: FiniteField, arr: np.ndarray) -> np.ndarray:
    """Injective integer keys for index arrays of shape (N, n, n) (canonical-order preserving)."""
    flat = arr.reshape(len(arr), -1)
    width = flat.shape[1]
    if width * math.log2(F.size) < 62:
        key = np.zeros(len(flat), dtype=np.int64)
        for j in range(width):
            key = key * F.size + flat[:, j]
        return key
    return np.array([tuple(r) for r in flat.tolist()], dtype=object)


# ---------------------------------------------------------------------------
# orders and Jordan decomposition


def exponent_bound(n: int, F: FiniteField) -> int:
    """A multiple of the order of every element of GL_n(F)."""
    q = F.size
    ell_part = 1
    while ell_part < n:
        ell_part *= F.ell
    out = ell_part
    for i in range(1, n + 1):
        out = out * (q ** i - 1) // math.gcd(out, q ** i - 1)
    return out


def element_order(g: FqMatrix) -> int:
    m = exponent_bound(g.n, g.field)
    if not (g ** m).is_identity():
        raise BadInput("matrix is not invertible")
    for p in prime_divisors(m):
        while m % p == 0 and (g ** (m // p)).is_identity():
            m //= p
    return m


def crt_exponents(order: int, ell: int) -> tuple[int, int]:
    """Exponents (a, b) with g^a semisimple part and g^b unipotent part for ord(g) = order."""
    lv = 1
    r = order
    while r % ell == 0:
        r //= ell
        lv *= ell
    if r == 1:
        return 0, 1
    if lv == 1:
        return 1, 0
    x = pow(lv, -1, r)
    y = pow(r, -1, lv)
    return lv * x, r * y


def jordan(g: FqMatrix) -> tuple[FqMatrix, FqMatrix]:
    """(s, u) with g = s u = u s, ord(s) prime to ell, ord(u) a power of ell."""
    order = element_order(g)
    a, b = crt_exponents(order, g.field.ell)
    return g ** a, g ** b


def is_unipotent(g: FqMatrix) -> bool:
    ident = FqMatrix.identity(g.n, g.field)
    return ((g - ident) ** g.n) == FqMatrix(g.n, g.field, (0,) * (g.n * g.n))


# ---------------------------------------------------------------------------
# conjugacy


def batch_inverse(F: FiniteField, arr: np.ndarray) -> np.ndarray:
    out = np.empty_like(arr)
    for i, m in enumerate(arr):
        out[i] = FqMatrix.from_array(m, F).inverse().array()
    return out


def conjugacy_reps(elements: Sequence[FqMatrix], subgroup: Sequence[FqMatrix]) -> list[tuple[FqMatrix, int]]:
    """Orbits of ``subgroup`` acting by conjugation on ``elements``.

    Returns ``(least element of the orbit, orbit size)`` in canonical order.
    """
    if not elements:
        return []
    F = elements[0].field
    elems = sorted(set(elements))
    H = np.array([h.array() for h in subgroup], dtype=np.int64)
    Hinv = batch_inverse(F, H)
    remaining = {e.entries: e for e in elems}
    out = []
    for e in elems:
        if e.entries not in remaining:
            continue
        conj = F.matmul_arr(F.matmul_arr(H, e.array()[None, :, :]), Hinv)
        orbit = {tuple(int(x) for x in m.ravel()) for m in conj}
        size = 0
        for key in orbit:
            if key in remaining:
                del remaining[key]
                size += 1
        out.append((e, size))
    return out
