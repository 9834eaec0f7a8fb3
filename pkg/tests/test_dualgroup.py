import itertools
import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from langparams.dualgroup import (
    ArithContext,
    LFactor,
    LGroupSpec,
    banal_report,
    chevalley_steinberg,
    chi_global,
    cocycle_exponent_map,
    compare_banal,
    git_component_descriptor,
    coinvariant_rank,
    lgroup_from_label,
    primes_up_to,
    torus_cocycle_count,
    torus_cocycle_group,
)
from langparams.errors import BadAction, BadInput, NotApplicable, NotPrime
from langparams.exactalg import IntMatrix, IntPoly
from langparams.rootdata import fundamental_degrees, parse_type, weyl_elements

T = IntPoly.T()
I1 = IntMatrix.identity(1)
I2 = IntMatrix.identity(2)
SWAP = IntMatrix.from_rows([[0, 1], [1, 0]])
NEG1 = IntMatrix.from_rows([[-1]])
NEG2 = IntMatrix.from_rows([[-1, 0], [0, -1]])
EMPTY = IntMatrix(0, 0, ())


def ctx(q, e=1):
    return ArithContext.from_q(q, e=e)


def single(label, q, f=1, e=1):
    return lgroup_from_label(label, ctx(q, e), f)


# ---------------------------------------------------------------------------
# context and specs


def test_arith_context_validation():
    assert ArithContext.from_q(9).p == 3
    with pytest.raises(NotPrime):
        ArithContext(4, 16)
    with pytest.raises(BadInput):
        ArithContext(2, 12)
    with pytest.raises(BadInput):
        ArithContext(3, 9, e=3)


def test_lgroup_json_round_trip():
    spec = single("GL3^2", 4)
    back = LGroupSpec.from_json(spec.to_json())
    assert chi_global(back) == chi_global(spec)
    assert back.to_json() == spec.to_json()


# ---------------------------------------------------------------------------
# chi_global


def test_chi_global_examples():
    torus = LGroupSpec((), 1, I1, ctx(3))
    assert chi_global(torus) == T - 1
    d, beta = parse_type("A1")
    spec = LGroupSpec((LFactor(d, 2, beta),), 0, EMPTY, ctx(3))
    assert chi_global(spec) == T ** 4 - 1
    tri = (T ** 2 - 1) * (T ** 6 - 1) * (T ** 8 + T ** 4 + 1)
    assert chi_global(single("SO8^3", 2)) == tri


def test_chi_global_abelian_twist():
    swap_torus = LGroupSpec((), 2, SWAP, ctx(3))
    assert chi_global(swap_torus) == T ** 2 - 1
    inv_torus = LGroupSpec((), 1, NEG1, ctx(3))
    assert chi_global(inv_torus) == T + 1


@pytest.mark.parametrize("labels, fs, r", [
    (["A2", "B2"], [1, 2], 0),
    (["GL2^2"], [3], 1),
    (["G2", "A1"], [1, 1], 2),
    (["D4^2"], [2], 0),
])
def test_chi_global_degree(labels, fs, r):
    factors = []
    expected = r
    for label, f in zip(labels, fs):
        d, beta = parse_type(label)
        factors.append(LFactor(d, f, beta))
        expected += f * sum(fundamental_degrees(d))
    spec = LGroupSpec(tuple(factors), r, IntMatrix.identity(r) if r else EMPTY, ctx(5))
    assert chi_global(spec).degree == expected


# ---------------------------------------------------------------------------
# Chevalley-Steinberg


def brute_group_count(n, q, pred):
    count = 0
    for entries in itertools.product(range(q), repeat=n * n):
        rows = [entries[i * n:(i + 1) * n] for i in range(n)]
        if pred(rows):
            count += 1
    return count


def det2(rows, q):
    return (rows[0][0] * rows[1][1] - rows[0][1] * rows[1][0]) % q


@pytest.mark.parametrize("q", [2, 3, 5])
def test_chevalley_steinberg_gl2_sl2_prime_fields(q):
    gl = brute_group_count(2, q, lambda r: det2(r, q) != 0)
    sl = brute_group_count(2, q, lambda r: det2(r, q) == 1)
    assert chevalley_steinberg(single("GL2", q)) == gl
    assert chevalley_steinberg(single("A1", q)) == sl


def test_chevalley_steinberg_examples():
    assert chevalley_steinberg(single("GL2", 3)) == 48
    assert chevalley_steinberg(single("Sp4", 2)) == 720
    assert chevalley_steinberg(single("GL3^2", 2)) == 648
    assert chevalley_steinberg(single("GL3", 2)) == 168


# ---------------------------------------------------------------------------
# banal primes


def test_banal_examples():
    r = banal_report(single("GL2", 3))
    assert list(r.excluded_general) == [2] and list(r.g_nonbanal) == [2]
    r = banal_report(single("GL3", 2))
    assert list(r.excluded_general) == [3, 7] and list(r.g_nonbanal) == [3, 7]
    r = banal_report(single("SO8^3", 2))
    assert r.chi_prime == T ** 12 - 1
    assert list(r.excluded_triality) == [3, 5, 7, 13]
    assert r.excluded_classical is None


def test_banal_excludes_p():
    for label, q in [("GL3", 2), ("Sp4", 3), ("GL2", 5), ("SO5", 4)]:
        r = banal_report(single(label, q))
        p = ArithContext.from_q(q).p
        assert p not in r.excluded_general
        assert p not in r.g_nonbanal
        assert p not in (r.excluded_classical or ())


def test_compare_banal_examples():
    flags = {ell: (a, b) for ell, a, b in compare_banal(single("GL2", 3), 50)}
    assert all(not a and not b for a, b in flags.values())
    flags = {ell: (a, b) for ell, a, b in compare_banal(single("GL4", 2), 50)}
    assert flags[5] == (True, True) and flags[7] == (True, True) and flags[11] == (False, False)
    flags = {ell: (a, b) for ell, a, b in compare_banal(single("Sp4", 3), 50)}
    assert flags[5] == (True, True)


@pytest.mark.parametrize("label", ["GL2", "GL3", "GL3^2", "Sp4", "SO5", "SO7", "A2xA1", "D4^2"])
@pytest.mark.parametrize("q", [2, 3, 4, 5, 7])
def test_compare_banal_flags_agree(label, q):
    for ell, a, b in compare_banal(single(label, q), 100):
        assert a == b, (label, q, ell)


def test_compare_banal_rejects():
    with pytest.raises(NotApplicable):
        compare_banal(single("G2", 3))
    with pytest.raises(NotApplicable):
        compare_banal(single("SO8^3", 2))
    with pytest.raises(NotApplicable):
        compare_banal(single("GL2", 3, e=2))


def test_primes_up_to():
    assert primes_up_to(20) == [2, 3, 5, 7, 11, 13, 17, 19]
    assert primes_up_to(1) == []


# ---------------------------------------------------------------------------
# torus cocycles


def field_point_count(a_fr, a_s, q, ell):
    """Count (F, sigma) in (F_ell^*)^r x (F_ell^*)^r solving the cocycle relation directly."""
    A = cocycle_exponent_map(a_fr, a_s, q).to_rows()
    r = a_fr.rows
    units = range(1, ell)
    count = 0
    for vec in itertools.product(units, repeat=2 * r):
        ok = True
        for row in A:
            val = 1
            for c, x in zip(row, vec):
                val = val * pow(x, c, ell) % ell
            if val != 1:
                ok = False
                break
        count += ok
    return count


def test_torus_cocycle_examples():
    assert torus_cocycle_group(I1, I1, 3) == (1, [2])
    assert torus_cocycle_group(I1, I1, 2) == (1, [])


def test_torus_cocycle_swap_case():
    # the SNF of the exponent matrix gives a cyclic torsion group of order 8
    assert torus_cocycle_group(SWAP, I2, 3) == (2, [8])
    # ell = 17 separates Z/8 from (Z/2)^2: gcd(8, 16) = 8 but gcd(2, 16)^2 = 4
    assert field_point_count(SWAP, I2, 3, 17) == 16 ** 2 * 8


@pytest.mark.parametrize("q", [2, 3, 4, 5, 7, 8, 9])
def test_rank_one_trivial_count(q):
    free, tors = torus_cocycle_group(I1, I1, q)
    for ell in primes_up_to(50):
        expected = (ell - 1) * math.gcd(q - 1, ell - 1)
        assert torus_cocycle_count(free, tors, ell) == expected
        if ell <= 23:
            assert field_point_count(I1, I1, q, ell) == expected


@pytest.mark.parametrize("a_fr, a_s, q", [
    (NEG1, I1, 3), (I1, NEG1, 3), (NEG1, NEG1, 3), (SWAP, I2, 2), (I2, SWAP, 3), (SWAP, SWAP, 3),
    (NEG2, I2, 2), (I2, NEG2, 3),
])
def test_torus_cocycle_counts_small_fields(a_fr, a_s, q):
    free, tors = torus_cocycle_group(a_fr, a_s, q)
    for ell in (3, 5, 7, 11, 13):
        if a_fr.rows == 2 and ell > 11:
            continue
        assert field_point_count(a_fr, a_s, q, ell) == torus_cocycle_count(free, tors, ell)


def test_torus_cocycle_relation_checked():
    with pytest.raises(BadAction):
        torus_cocycle_group(I2, SWAP, 2)
    with pytest.raises(BadInput):
        torus_cocycle_group(I1, I1, 1)


# ---------------------------------------------------------------------------
# GIT component descriptors


def test_git_component_examples():
    d = parse_type("GL3")[0]
    W = weyl_elements(d)
    assert git_component_descriptor(3, IntMatrix.identity(3), W) == (3, 6)
    assert git_component_descriptor(2, SWAP, [I2, SWAP]) == (1, 2)
    assert git_component_descriptor(1, NEG1, [I1]) == (0, 1)


@given(st.sampled_from([I2, SWAP, NEG2, IntMatrix.from_rows([[0, -1], [1, -1]]), IntMatrix.from_rows([[0, -1], [1, 0]])]))
def test_coinvariant_rank_matches_lattice_kernel(beta):
    inv_rank, _ = git_component_descriptor(2, beta, [I2])
    assert inv_rank == coinvariant_rank(beta)
