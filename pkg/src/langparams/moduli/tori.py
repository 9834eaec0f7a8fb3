"""Points of a torus fixed by a twisted Frobenius: t with beta(t) = t^q."""

from __future__ import annotations

import itertools
import math

import numpy as np

from ..errors import BadInput
from ..exactalg import IntMatrix, IntPoly, smith_normal_form
from ..fingrp import FiniteField

BRUTE_FORCE_LIMIT = 10**6


def _as_matrix(beta, rank: int) -> IntMatrix:
    M = beta if isinstance(beta, IntMatrix) else IntMatrix.from_rows(beta, rank)
    if M.rows != rank or M.cols != rank:
        raise BadInput(f"beta must be a {rank}x{rank} matrix")
    return M


def _solution_invariants(B: IntMatrix, q: int, m: int) -> list[int]:
    """Cyclic factors of {x in (Z/m)^r : (B - q) x = 0}."""
    r = B.rows
    A = B - IntMatrix.identity(r).scale(q)
    _, D, _ = smith_normal_form(A)
    return [math.gcd(D[i, i], m) for i in range(r)]


def _brute_force_orders(B: IntMatrix, q: int, m: int) -> list[int]:
    r = B.rows
    A = np.array((B - IntMatrix.identity(r).scale(q)).to_rows(), dtype=np.int64)
    grid = np.array(list(itertools.product(range(m), repeat=r)), dtype=np.int64)
    ok = ((grid @ A.T) % m == 0).all(axis=1)
    sols = grid[ok]
    g = np.gcd.reduce(np.concatenate([sols, np.full((len(sols), 1), m)], axis=1), axis=1)
    return sorted(set((m // g).tolist()))


def twisted_torus_orders(rank: int, beta, field: FiniteField, q: int, chi: IntPoly) -> int:
    """Largest order of t in (F^x)^rank with beta(t) = t^q.

    ``beta`` acts on coordinates by monomials: beta(t)_i = prod_j t_j^B[i][j].
    Every order found must divide chi(q).
    """
    if rank < 1 or rank > 3:
        raise BadInput("rank must be between 1 and 3")
    if field.size > 4096:
        raise BadInput("field too large")
    B = _as_matrix(beta, rank)
    m = field.size - 1  # t = g^x with g a generator of F^x
    target = abs(chi(q))
    if m ** rank <= BRUTE_FORCE_LIMIT:
        orders = _brute_force_orders(B, q, m)
        structural = max(_solution_invariants(B, q, m), default=1)
        assert max(orders) == structural, "brute force and Smith form disagree"
    else:
        inv = _solution_invariants(B, q, m)
        orders = [math.lcm(*inv)]
    for o in orders:
        assert target % o == 0, f"order {o} does not divide chi(q) = {target}"
    return max(orders)
