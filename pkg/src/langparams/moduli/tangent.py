"""Tangent spaces and twisted invariants at a tame parameter.

Infinitesimal deformations (F0 -> (1 + eps X) F0, sigma0 -> (1 + eps Y) sigma0)
of a point are the solutions of the Fox-derivative relation

    (1 - A_s^q) X + (A_fr - (1 + A_s + ... + A_s^(q-1))) Y = 0,

where A_s = Ad(sigma0) o d theta_s and A_fr = Ad(F0) o d theta_fr act on the
Lie algebra.  The twisted invariants are {v : A_s v = v, q A_fr v = v}.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ..errors import NotSupported
from ..fingrp import FiniteField, FqMatrix, GroupSpecFin
from .points import TameParameterPoint
from .semidirect import ad_matrix

# ---------------------------------------------------------------------------
# linear algebra over a finite field (index arrays)


def rref(F: FiniteField, M: np.ndarray) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form and pivot columns."""
    A = np.array(M, dtype=np.int64).copy()
    rows, cols = A.shape
    pivots = []
    r = 0
    for c in range(cols):
        if r >= rows:
            break
        nz = np.nonzero(A[r:, c])[0]
        if len(nz) == 0:
            continue
        p = r + int(nz[0])
        if p != r:
            A[[r, p]] = A[[p, r]]
        inv = F.inv(int(A[r, c]))
        A[r] = F.mul_arr(A[r], inv)
        for i in range(rows):
            if i != r and A[i, c]:
                factor = F.neg(int(A[i, c]))
                A[i] = F.add_arr(A[i], F.mul_arr(A[r], factor))
        pivots.append(c)
        r += 1
    return A, pivots


def rank(F: FiniteField, M: np.ndarray) -> int:
    if M.size == 0:
        return 0
    return len(rref(F, M)[1])


def nullspace(F: FiniteField, M: np.ndarray, ncols: int) -> tuple[np.ndarray, list[int]]:
    """Basis rows of {v : M v = 0} and the free columns (where the basis is the identity)."""
    if M.size == 0:
        return np.eye(ncols, dtype=np.int64), list(range(ncols))
    R, piv = rref(F, M)
    free = [c for c in range(ncols) if c not in piv]
    basis = np.zeros((len(free), ncols), dtype=np.int64)
    for b, fcol in enumerate(free):
        basis[b, fcol] = 1
        for i, pc in enumerate(piv):
            basis[b, pc] = F.neg(int(R[i, fcol]))
    return basis, free


def mat_identity(F: FiniteField, d: int) -> np.ndarray:
    return np.eye(d, dtype=np.int64)


def mat_sub(F: FiniteField, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    return F.add_arr(A, F.neg_arr(B)).astype(np.int64)


def mat_add(F: FiniteField, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    return F.add_arr(A, B).astype(np.int64)


# ---------------------------------------------------------------------------
# Lie algebras


@dataclass(frozen=True)
class LieAlgebra:
    """Subspace of gl_n given by basis rows (vec of matrices) and its coordinate columns."""

    name: str
    n: int
    basis: np.ndarray
    coord_cols: tuple

    @property
    def dim(self) -> int:
        return len(self.basis)

    def restrict(self, F: FiniteField, full: np.ndarray) -> np.ndarray:
        """Matrix on the subalgebra of a linear map of gl_n preserving it."""
        images = F.matmul_arr(full, self.basis.T)  # columns are images of basis vectors
        return images[list(self.coord_cols), :]


@lru_cache(maxsize=64)
def lie_algebra(spec: GroupSpecFin) -> LieAlgebra:
    F = spec.field
    n = spec.n
    N = n * n
    rows = []
    if spec.kind == "GL":
        name = f"gl{n}"
    elif spec.kind == "SL":
        name = f"sl{n}"
        rows.append([1 if (k // n) == (k % n) else 0 for k in range(N)])
    elif spec.kind == "T":
        name = f"t{n}"
        for k in range(N):
            if k // n != k % n:
                rows.append([int(t == k) for t in range(N)])
    elif spec.kind == "Sp":
        name = f"sp{n}"
        J = spec.form().array()
        # X J + J X^T = 0, entry (i, j)
        for i in range(n):
            for j in range(n):
                row = [0] * N
                for t in range(n):
                    # (X J)_ij = sum_t X_it J_tj ; (J X^T)_ij = sum_t J_it X_jt
                    row[i * n + t] = F.add(row[i * n + t], int(J[t, j]))
                    row[j * n + t] = F.add(row[j * n + t], int(J[i, t]))
                rows.append(row)
    else:
        raise NotSupported(f"no Lie algebra for kind {spec.kind}")
    C = np.array(rows, dtype=np.int64).reshape(-1, N) if rows else np.zeros((0, N), dtype=np.int64)
    basis, free = nullspace(F, C, N)
    return LieAlgebra(name, n, basis, tuple(free))


# ---------------------------------------------------------------------------
# tangent report


@dataclass(frozen=True)
class TangentReport:
    dim_tangent: int
    dim_h0_twist: int
    unobstructed: bool
    dim_g: int
    equality: bool

    def to_json(self) -> dict:
        return {"dim": str(self.dim_tangent), "h0": str(self.dim_h0_twist),
                "unobstructed": self.unobstructed, "dim_g": str(self.dim_g), "equality": self.equality}


def adjoint_operators(pt: TameParameterPoint) -> tuple[np.ndarray, np.ndarray, LieAlgebra]:
    """(A_s, A_fr) restricted to the Lie algebra of the group."""
    spec = pt.spec
    F = spec.field
    lie = lie_algebra(spec)
    n = spec.n
    full_s = F.matmul_arr(ad_matrix(F, pt.sigma0), pt.sd.theta_s.lie_matrix(F, n))
    full_fr = F.matmul_arr(ad_matrix(F, pt.F0), pt.sd.theta_fr.lie_matrix(F, n))
    return lie.restrict(F, full_s), lie.restrict(F, full_fr), lie


def tangent_from_operators(F: FiniteField, A_s: np.ndarray, A_fr: np.ndarray, q: int) -> TangentReport:
    d = A_s.shape[0]
    ident = mat_identity(F, d)
    power = ident
    norm = np.zeros((d, d), dtype=np.int64)
    for _ in range(q):
        norm = mat_add(F, norm, power)
        power = F.matmul_arr(power, A_s)
    left = mat_sub(F, ident, power)       # 1 - A_s^q
    right = mat_sub(F, A_fr, norm)        # A_fr - N_q
    phi = np.concatenate([left, right], axis=1)
    dim_t = 2 * d - rank(F, phi)
    qf = F.from_int(q)
    h0_rows = np.concatenate([mat_sub(F, A_s, ident), mat_sub(F, F.mul_arr(A_fr, qf).astype(np.int64), ident)])
    h0 = d - rank(F, h0_rows)
    return TangentReport(dim_t, h0, h0 == 0, d, dim_t == d + h0)


def tangent_report(pt: TameParameterPoint) -> TangentReport:
    A_s, A_fr, _ = adjoint_operators(pt)
    return tangent_from_operators(pt.spec.field, A_s, A_fr, pt.sd.q)
