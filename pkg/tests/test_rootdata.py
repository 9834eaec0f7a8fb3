import math

import pytest
from sympy import Matrix

from langparams.errors import DegenerateChi, UnsupportedType, WeylTooLarge
from langparams.exactalg import IntMatrix, IntPoly, divides_over_q
from langparams.rootdata import (
    automorphism_from_matrix,
    build_root_datum,
    chi_oracle,
    chi_prime,
    chi_star,
    chi_table,
    chi_twisted,
    fundamental_degrees,
    parse_type,
    twisted_charpolys,
    twisted_coxeter,
    weyl_elements,
    weyl_order,
)

T = IntPoly.T()


def pairing(a, b):
    return sum(x * y for x, y in zip(a, b))


# ---------------------------------------------------------------------------
# root data


def test_gl2_datum():
    d = build_root_datum("GL2")
    assert d.rank == 2
    assert set(d.roots) == {(1, -1), (-1, 1)}


def test_g2_has_twelve_roots():
    d = build_root_datum("G2")
    assert d.rank == 2 and len(d.roots) == 12


def test_sp4_long_roots():
    d = build_root_datum("Sp4")
    assert d.rank == 2 and len(d.roots) == 8
    assert {(2, 0), (-2, 0), (0, 2), (0, -2)} <= set(d.roots)


def test_torus_has_no_roots():
    d = build_root_datum("T3")
    assert d.rank == 3 and d.is_torus()
    assert fundamental_degrees(d) == [1, 1, 1]


@pytest.mark.parametrize("label", ["X3", "A0", "E9", "foo"])
def test_unknown_label(label):
    with pytest.raises(UnsupportedType):
        build_root_datum(label)


DATA_LABELS = ["A1", "A3", "B3", "C3", "D4", "G2", "F4", "GL3", "Sp4", "SO5", "SO8", "A2xB2", "GL2xT1"]


@pytest.mark.parametrize("label", DATA_LABELS)
def test_root_datum_invariants(label):
    d = build_root_datum(label)
    for a, c in zip(d.roots, d.coroots):
        assert pairing(a, c) == 2
    for a in d.roots:
        coeffs = d.simple_coefficients(a)
        assert all(x.denominator == 1 for x in coeffs)
        assert all(x >= 0 for x in coeffs) or all(x <= 0 for x in coeffs)
    simple, co = d.simple_roots, d.simple_coroots
    for i in range(len(simple)):
        for j in range(len(simple)):
            assert d.cartan[i, j] == pairing(simple[j], co[i])
    if simple:
        assert Matrix(simple).rank() == len(simple)


# ---------------------------------------------------------------------------
# Weyl groups and degrees


@pytest.mark.parametrize("label, size", [("A1", 2), ("B2", 8), ("G2", 12), ("A3", 24), ("F4", 1152)])
def test_weyl_sizes(label, size):
    d = build_root_datum(label)
    W = weyl_elements(d)
    assert len(W) == size == weyl_order(d)
    assert len({w.entries for w in W}) == size


def test_weyl_bound():
    with pytest.raises(WeylTooLarge) as info:
        weyl_elements(build_root_datum("E7"))
    assert info.value.partial_count == 0
    with pytest.raises(WeylTooLarge):
        weyl_elements(build_root_datum("B4"), bound=100)


@pytest.mark.parametrize("label, degrees", [
    ("A1", [2]), ("GL2", [1, 2]), ("G2", [2, 6]), ("F4", [2, 6, 8, 12]),
    ("E6", [2, 5, 6, 8, 9, 12]), ("E8", [2, 8, 12, 14, 18, 20, 24, 30]), ("D4", [2, 4, 4, 6]),
])
def test_fundamental_degrees(label, degrees):
    assert fundamental_degrees(build_root_datum(label)) == degrees


@pytest.mark.parametrize("label", ["A1", "A2", "A3", "A4", "B2", "B3", "B4", "C3", "D4", "G2", "F4", "GL3", "SO7"])
def test_degree_sum_and_product(label):
    d = build_root_datum(label)
    degs = fundamental_degrees(d)
    assert sum(degs) == d.num_positive_roots + d.semisimple_rank + d.central_rank
    assert math.prod(x for x in degs if x > 1) == len(weyl_elements(d))


# ---------------------------------------------------------------------------
# chi


def test_chi_examples():
    assert chi_twisted(*parse_type("GL2")) == (T - 1) * (T ** 2 - 1)
    assert chi_twisted(*parse_type("GL3^2")) == (T + 1) * (T ** 2 - 1) * (T ** 3 + 1)
    tri = (T ** 2 - 1) * (T ** 6 - 1) * (T ** 8 + T ** 4 + 1)
    assert chi_twisted(*parse_type("SO8^3")) == tri


@pytest.mark.parametrize("label", ["A1", "A2", "A3", "A4", "B2", "B3", "B4", "C2", "C3", "C4", "D4",
                                   "G2", "F4", "GL2", "GL3", "SO5", "Sp6"])
def test_oracle_table_untwisted(label):
    d, beta = parse_type(label)
    assert chi_oracle(d, beta) == chi_table(d, beta)


@pytest.mark.parametrize("label", ["A2^2", "A3^2", "A4^2", "D4^2", "D3^2", "SO8^3", "GL2^2", "GL4^2"])
def test_oracle_table_twisted(label):
    d, beta = parse_type(label)
    assert chi_oracle(d, beta) == chi_table(d, beta)


@pytest.mark.parametrize("label", ["A2", "A2^2", "B3", "GL3^2", "SO8^3", "D4^2", "G2", "A2xA1"])
def test_chi_degree_independent_of_twist(label):
    d, beta = parse_type(label)
    degs = fundamental_degrees(d)
    assert chi_twisted(d, beta).degree == sum(degs)


@pytest.mark.parametrize("label", ["A2^2", "B2", "SO8^3", "GL3^2", "D4^2"])
def test_each_charpoly_divides_chi(label):
    d, beta = parse_type(label)
    chi = chi_twisted(d, beta)
    for p in twisted_charpolys(d, beta):
        assert divides_over_q(p, chi)


@pytest.mark.parametrize("label", ["A2^2", "SO8^3", "A4^2", "D4^2"])
def test_chi_invariant_under_inverse(label):
    d, beta = parse_type(label)
    beta_inv = automorphism_from_matrix(d, beta.inverse_matrix())
    assert chi_oracle(d, beta) == chi_oracle(d, beta_inv)


def test_twisted_coxeter():
    assert twisted_coxeter(T ** 2 - 1) == 2
    assert twisted_coxeter(chi_twisted(*parse_type("SO8^3"))) == 12
    assert twisted_coxeter(chi_twisted(*parse_type("GL3^2"))) == 6
    with pytest.raises(DegenerateChi):
        twisted_coxeter(IntPoly.const(3))


def test_chi_star_and_prime():
    assert chi_star(*parse_type("A1")) == T ** 2 - 1
    assert chi_star(*parse_type("GL2")) == T ** 2 - 1
    assert chi_prime(*parse_type("SO8^3")) == T ** 12 - 1
    d, beta = parse_type("B3")
    assert chi_prime(d, beta) == chi_twisted(d, beta)


def test_automorphism_invariants():
    for label in ["A2^2", "SO8^3", "D4^2", "GL3^2", "E6^2"]:
        d, beta = parse_type(label)
        M = beta.lattice_matrix
        assert M ** beta.order == IntMatrix.identity(d.rank)
        for k in range(1, beta.order):
            assert M ** k != IntMatrix.identity(d.rank)
        roots = set(d.roots)
        images = {tuple(sum(M[i, j] * a[j] for j in range(d.rank)) for i in range(d.rank)) for a in d.roots}
        assert images == roots
        for i, a in enumerate(d.simple_roots):
            img = tuple(sum(M[r, j] * a[j] for j in range(d.rank)) for r in range(d.rank))
            assert img == d.simple_roots[beta.simple_perm[i]]
