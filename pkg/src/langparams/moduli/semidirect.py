"""Automorphisms of matrix groups and the semidirect data of a tame parameter problem.

Group elements are handled as rows of an index array (see
:func:`langparams.fingrp.group_array`).  An automorphism is turned into an
index permutation of that array once, so composition and powers are cheap.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from ..errors import BadAction, BadInput, NotSupported
from ..fingrp import (
    FiniteField,
    FqMatrix,
    GroupSpecFin,
    batch_inverse,
    group_array,
    matrix_keys,
)


@dataclass(frozen=True)
class TwistAut:
    """g -> c tau(g) c^-1 where tau is the identity or g -> (g^T)^-1.

    ``conj=None`` stands for c = I.
    """

    conj: FqMatrix | None = None
    inv_transpose: bool = False

    def apply(self, g: FqMatrix) -> FqMatrix:
        h = g.inverse().transpose() if self.inv_transpose else g
        if self.conj is None:
            return h
        return self.conj @ h @ self.conj.inverse()

    def apply_arr(self, F: FiniteField, arr: np.ndarray) -> np.ndarray:
        out = arr
        if self.inv_transpose:
            out = np.swapaxes(batch_inverse(F, arr), -1, -2)
        if self.conj is not None:
            c = self.conj.array()
            cinv = self.conj.inverse().array()
            out = F.matmul_arr(F.matmul_arr(c[None], out), cinv[None])
        return out

    def compose(self, other: "TwistAut") -> "TwistAut":
        """self after other."""
        if other.conj is None:
            c = self.conj
        else:
            inner = other.conj.inverse().transpose() if self.inv_transpose else other.conj
            c = inner if self.conj is None else self.conj @ inner
        return TwistAut(c, self.inv_transpose != other.inv_transpose)

    def lie_matrix(self, F: FiniteField, n: int) -> np.ndarray:
        """Derivative on gl_n as an n^2 x n^2 matrix acting on row-major vec(X)."""
        N = n * n
        if self.inv_transpose:
            # X -> -X^T
            M = np.zeros((N, N), dtype=np.int64)
            minus = F.neg(1)
            for i in range(n):
                for j in range(n):
                    M[j * n + i, i * n + j] = minus
        else:
            M = np.eye(N, dtype=np.int64)
        if self.conj is not None:
            M = F.matmul_arr(ad_matrix(F, self.conj), M)
        return M

    def is_trivial(self) -> bool:
        return self.conj is None and not self.inv_transpose

    def to_json(self) -> dict:
        return {"conj": None if self.conj is None else self.conj.to_json(),
                "inv_transpose": self.inv_transpose}

    @classmethod
    def from_json(cls, data: dict | None) -> "TwistAut":
        if not data:
            return cls()
        conj = FqMatrix.from_json(data["conj"]) if data.get("conj") else None
        return cls(conj, bool(data.get("inv_transpose", False)))


def ad_matrix(F: FiniteField, g: FqMatrix) -> np.ndarray:
    """X -> g X g^-1 on row-major vec(X): the Kronecker product g (x) g^-T."""
    a = g.array()
    b = g.inverse().array()  # vec(A X B) = (A kron B^T) vec(X)
    n = g.n
    out = F.mul_arr(a[:, None, :, None], b.T[None, :, None, :]).astype(np.int64)
    return out.reshape(n * n, n * n)


class GroupContext:
    """Enumerated group with key lookup and automorphism permutations."""

    def __init__(self, spec: GroupSpecFin, bound: int | None = None):
        if spec.kind == "U":
            raise NotSupported("parameter enumeration is not implemented for unitary groups")
        self.spec = spec
        self.F = spec.field
        self.n = spec.n
        self.arr = group_array(spec) if bound is None else group_array(spec, bound)
        self.keys = matrix_keys(self.F, self.arr)
        if self.keys.dtype == object:
            self._lookup = {k: i for i, k in enumerate(self.keys)}
        self.size = len(self.arr)

    def index_of(self, arr: np.ndarray) -> np.ndarray:
        """Indices of matrices (must be group members) in the canonical array; -1 if absent."""
        keys = matrix_keys(self.F, arr)
        if self.keys.dtype == object:
            return np.array([self._lookup.get(k, -1) for k in keys], dtype=np.int64)
        pos = np.searchsorted(self.keys, keys)
        pos = np.clip(pos, 0, self.size - 1)
        return np.where(self.keys[pos] == keys, pos, -1)

    def matrix(self, i: int) -> FqMatrix:
        return FqMatrix.from_array(self.arr[i], self.F)

    def index(self, g: FqMatrix) -> int:
        return int(self.index_of(g.array()[None])[0])

    def perm(self, theta: TwistAut) -> np.ndarray:
        idx = self.index_of(theta.apply_arr(self.F, self.arr))
        if (idx < 0).any():
            raise BadAction("automorphism does not preserve the group")
        return idx

    @cached_property
    def inverse_perm(self) -> np.ndarray:
        return self.index_of(batch_inverse(self.F, self.arr))

    @cached_property
    def identity_index(self) -> int:
        return self.index(FqMatrix.identity(self.n, self.F))


def _perm_power(p: np.ndarray, e: int) -> np.ndarray:
    out = np.arange(len(p))
    base = p
    while e:
        if e & 1:
            out = base[out]
        base = base[base]
        e >>= 1
    return out


def _perm_order(p: np.ndarray, limit: int = 100_000) -> int:
    ident = np.arange(len(p))
    cur = p
    for k in range(1, limit + 1):
        if np.array_equal(cur, ident):
            return k
        cur = p[cur]
    raise BadAction("automorphism order exceeds the search limit")


@dataclass
class SemidirectData:
    """Actions of Fr and s on the group, the exponent q, and the verified W-relation."""

    theta_fr: TwistAut
    theta_s: TwistAut
    q: int
    w_relation_ok: bool = False
    order_fr: int = 0
    order_s: int = 0
    _perms: dict = field(default_factory=dict, repr=False, compare=False)

    @classmethod
    def trivial(cls, q: int) -> "SemidirectData":
        return cls(TwistAut(), TwistAut(), q)

    def verify(self, ctx: GroupContext) -> "SemidirectData":
        """Check theta_fr o theta_s = theta_s^q o theta_fr on every group element."""
        if self.q < 2:
            raise BadInput("q must be >= 2")
        pf = ctx.perm(self.theta_fr)
        ps = ctx.perm(self.theta_s)
        lhs = pf[ps]          # theta_fr(theta_s(g))
        rhs = _perm_power(ps, self.q)[pf]
        self.w_relation_ok = bool(np.array_equal(lhs, rhs))
        self.order_fr = _perm_order(pf)
        self.order_s = _perm_order(ps)
        self._perms = {"fr": pf, "s": ps, "ctx": ctx.spec}
        return self

    def perms(self, ctx: GroupContext) -> tuple[np.ndarray, np.ndarray]:
        if self._perms.get("ctx") != ctx.spec:
            self.verify(ctx)
        return self._perms["fr"], self._perms["s"]

    def require(self, ctx: GroupContext) -> None:
        self.verify(ctx)
        if not self.w_relation_ok:
            raise BadAction("the actions violate Fr s Fr^-1 = s^q")

    def to_json(self) -> dict:
        return {"q": str(self.q), "theta_fr": self.theta_fr.to_json(), "theta_s": self.theta_s.to_json()}
