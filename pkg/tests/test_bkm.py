from fractions import Fraction

import pytest

from latvoa import bkm
from latvoa.acceptance import hecke_coset_oracle
from latvoa.lattice import build_lattice, root_system
from latvoa.series import MultiSeries

from oracles import euler_product


# BKM matrices -----------------------------------------------------------------

@pytest.mark.parametrize("rows", [
    [[2]],
    [[2, -1], [-1, 2]],
    [[2, -2], [-2, 2]],
    [[-2, -3], [-3, 0]],
    [[2, -1], [Fraction(-1, 2), -4]],
])
def test_bkm_matrices_accepted(rows):
    ok, diag = bkm.is_bkm_matrix(rows)
    assert ok and diag == []


@pytest.mark.parametrize("rows,condition", [
    ([[1]], "condition 1"),
    ([[2, 1], [-1, 2]], "condition 2"),
    ([[2, -1], [0, 2]], "condition 3"),
    ([[2, Fraction(-1, 2)], [-1, 0]], "condition 4"),
])
def test_bkm_violations_are_named(rows, condition):
    ok, diag = bkm.is_bkm_matrix(rows)
    assert not ok
    assert any(d.startswith(condition) for d in diag)


def test_bkm_matrix_indices():
    m = bkm.BkmMatrix.from_rows([[2, -1, 0], [-1, 0, -2], [0, -2, -4]])
    assert m.real_indices == [0] and m.imaginary_indices == [1, 2]
    assert not m.is_generalized_cartan
    with pytest.raises(ValueError):
        bkm.BkmMatrix.from_rows([[3]])
    with pytest.raises(ValueError):
        bkm.is_bkm_matrix([[2, 0]])


# affine denominators ------------------------------------------------------------

def test_a1_is_the_triple_product():
    rs = root_system("A1")
    order = 5
    exp = bkm.affine_denominator(rs, order, rs.simple_roots[0])
    terms = {(n * (n + 1), 4 * n): (-1) ** n for n in range(-6, 6) if n * (n + 1) < 2 * order}
    assert exp.series.terms == terms
    assert exp.prefactor == {"xi": 1}
    assert exp.dropped == 0


def test_torus_is_an_euler_power():
    exp = bkm.affine_denominator(3, 8)
    want = euler_product(3, 8)
    assert [exp.series.coeff(n, 0) for n in range(8)] == want


def test_a1_plus_a1_is_multiplicative():
    order = 5
    rs2 = root_system("A1^2")
    L2 = rs2.lattice
    v0 = rs2.simple_roots[0] + rs2.simple_roots[1] * 2
    both = bkm.affine_denominator(rs2, order, v0)
    a1 = root_system("A1")
    one = bkm.affine_denominator(a1, order, a1.simple_roots[0])
    two = bkm.affine_denominator(a1, order, a1.simple_roots[0] * 2)
    assert both.series == one.series * two.series
    assert both.prefactor["xi"] == one.prefactor["xi"] + two.prefactor["xi"] == L2.inner(rs2.weyl_vector, v0)


def test_orthogonal_specialisation_drops_factors():
    rs = root_system("A1")
    exp = bkm.affine_denominator(rs, 3, [0])
    assert exp.dropped == 1


def test_truncation_guard():
    with pytest.raises(ValueError):
        bkm.affine_denominator(root_system("A1"), 0)


# fake monster character -----------------------------------------------------------

def test_character_values():
    table = bkm.fake_monster_character(1)
    assert table == {(1, -1): 1, (1, 0): 24, (1, 1): 196884}


def test_character_rejects_a_lattice_with_roots():
    with pytest.raises(bkm.IdentityFailure):
        bkm.fake_monster_character(1, build_lattice("E8^3"))


# Hecke operators --------------------------------------------------------------------

def test_t1_is_the_identity():
    phi = bkm.phi_minus2_1(10)
    assert bkm.hecke_Tl(phi, 1) == phi


def test_t2_on_a_monomial():
    phi = bkm.JacobiFormSeries(4, 1, {(2, 1): 3}, 20)
    img = bkm.hecke_Tl(phi, 2)
    assert img.coeffs == {(1, 1): 3, (4, 2): 24}
    assert img.order == 10 and img.index == 2 and img.weight == 4


def test_weight_zero_gives_rational_coefficients():
    phi = bkm.JacobiFormSeries(0, 1, {(1, 1): 1}, 10)
    assert bkm.hecke_Tl(phi, 2).coeffs == {(2, 2): Fraction(1, 2)}
    assert bkm.hecke_Tl(phi, 3).coeffs == {(3, 3): Fraction(1, 3)}


@pytest.mark.parametrize("l", [2, 3, 4, 6])
def test_hecke_against_coset_sums(l):
    phi = bkm.phi_minus2_1(25)
    img = bkm.hecke_Tl(phi, l)
    oracle = hecke_coset_oracle(phi, l)
    for n in range(img.order):
        for r in range(-8, 9):
            assert img[(n, r)] == oracle.get((n, r), 0)


def test_hecke_on_the_e8_theta_quotient():
    rs = root_system("E8")
    phi = bkm.theta_quotient_phi(rs.lattice, rs.simple_roots[0], 7)
    assert phi.weight == 0 and phi.index == 1
    img = bkm.hecke_Tl(phi, 2)
    oracle = hecke_coset_oracle(phi, 2)
    assert {k: c for k, c in oracle.items() if k[0] < img.order} == img.coeffs


def test_phi_minus2_1_leading_terms():
    phi = bkm.phi_minus2_1(3)
    assert [phi[(0, r)] for r in (-1, 0, 1)] == [1, -2, 1]
    assert [phi[(1, r)] for r in (-2, -1, 0, 1, 2)] == [-2, 8, -12, 8, -2]
    with pytest.raises(ValueError):
        phi[(3, 0)]


def test_theta_quotient_coefficients_are_p24():
    rs = root_system("E8")
    phi = bkm.theta_quotient_phi(rs.lattice, rs.simple_roots[0], 3)
    # c(0, r) = p_24(1 - l^2/2): 24 from l = 0 plus 1 for each of the 240 roots
    assert sum(c for (n, _), c in phi.coeffs.items() if n == 0) == 24 + 240
    with pytest.raises(ValueError):
        bkm.JacobiFormSeries(0, 1, {(Fraction(1, 2), 0): 1}, 3)


# cusp Weyl vector and products -----------------------------------------------------------

def test_weyl_vector_for_e8_cubed():
    rs = root_system("E8^3")
    A, B, C = bkm.weyl_vector_cusp(rs)
    assert (A, C) == (31, 30)
    assert A - C == 1
    assert B == rs.weyl_vector
    with pytest.raises(ValueError):
        bkm.weyl_vector_cusp(root_system("E8"))
    with pytest.raises(TypeError):
        bkm.weyl_vector_cusp(build_lattice("E8^3"))


@pytest.fixture(scope="module")
def e8_cubed():
    rs = root_system("E8^3")
    return rs, rs.simple_roots[0]


def test_three_routes_to_the_s0_slice(e8_cubed):
    rs, v0 = e8_cubed
    prod = bkm.borcherds_expand(rs, v0, 0, 3)
    grit = bkm.gritsenko_psi(rs, v0, 3)
    aff = bkm.affine_denominator(rs, 3, v0)
    assert bkm.s_slice(prod, 0).terms == grit.series.terms == aff.series.terms
    assert prod.dropped == grit.dropped == aff.dropped == 303
    assert prod.prefactor == {"q": 31, "xi": 1, "s": 30}
    assert grit.prefactor["q"] == 31 and aff.prefactor["xi"] == 1


def test_fourier_jacobi_leading_terms():
    phi = bkm.phi_minus2_1(8)
    t0, t1 = bkm.fourier_jacobi_via_hecke(phi, 1, 3)
    assert t0.terms == {(0, 0): 1}
    assert t1 == (phi.to_multiseries() * -1).truncate2((6, None))
    with pytest.raises(ValueError):
        bkm.fourier_jacobi_via_hecke(phi, 1, 3, "other")
    with pytest.raises(ValueError):
        bkm.fourier_jacobi_via_hecke(bkm.phi_minus2_1(2), 3, 3)


def test_log_weights_reproduce_every_slice(e8_cubed):
    rs, v0 = e8_cubed
    assert bkm.fourier_jacobi_check(rs, v0, 2, 2, "log") == {0: True, 1: True, 2: True}


def test_one_over_m_weights_first_differ_at_s2(e8_cubed):
    rs, v0 = e8_cubed
    assert bkm.fourier_jacobi_check(rs, v0, 2, 2, "stated") == {0: True, 1: True, 2: False}


def test_borcherds_budget(e8_cubed):
    rs, v0 = e8_cubed
    with pytest.raises(bkm.BudgetError):
        bkm.borcherds_expand(rs, v0, 3, 4, max_norm=4)


def test_coefficient_window():
    phi = bkm.phi_minus2_1(3)
    assert bkm.coefficient_window(phi, [0], [-1, 0, 1]) == [[1, -2, 1]]


def test_multiseries_view_roundtrip():
    phi = bkm.phi_minus2_1(4)
    again = bkm.JacobiFormSeries.from_multiseries(phi.to_multiseries(), -2, 1)
    assert again == phi
    with pytest.raises(ValueError):
        bkm.JacobiFormSeries.from_multiseries(MultiSeries(("q", "s"), {}, (4, None)), 0, 1)
