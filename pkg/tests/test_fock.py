from fractions import Fraction

import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from latvoa.fock import (
    BudgetError,
    FockVector,
    PhysicalBasis,
    apply_mode,
    apply_virasoro,
    bilinear_form,
    bracket_p1,
    ddf_A,
    frame_for,
    graded_keys,
    is_physical,
    longitudinal_L,
    physical_basis,
    quotient_dimension,
    radical_split,
    transverse_basis,
    vertex_coefficient,
)
from latvoa.lattice import build_lattice, root_system

DDF_LATTICE = "II11+A2"
C, ALPHA = (1, 0, 0, 0), (0, 1, 0, 0)
A1, A2 = (0, 0, 1, 0), (0, 0, 0, 1)


def fr(name):
    return frame_for(name)


def basis_states(name, point, max_level):
    f = fr(name)
    out = []
    for lev in range(max_level + 1):
        out += [FockVector(f, {k: Fraction(1)}) for k in graded_keys(f, point, lev)]
    return out


# mode actions ---------------------------------------------------------------

def test_zero_mode_reads_the_momentum():
    f = fr("A2")
    for a, b in [((1, 0), (0, 1)), ((2, -1), (1, 3))]:
        e = FockVector.vacuum(f, b)
        assert apply_mode(a, 0, e) == e * f.inner(a, b)


def test_annihilation_against_creation():
    f = fr("A2")
    for a in [(1, 0), (1, 1), (2, -3)]:
        vac = FockVector.vacuum(f)
        assert apply_mode(a, 1, apply_mode(a, -1, vac)) == vac * f.inner(a, a)
        assert apply_mode(a, 2, apply_mode(a, -1, vac)).is_zero()


def test_creation_is_multiplication():
    f = fr("A2")
    v = apply_mode((1, 0), -2, FockVector.vacuum(f))
    assert v == FockVector.monomial(f, [(0, -2)])
    assert v.weight() == 2


@given(st.integers(-3, 3), st.integers(-3, 3), st.sampled_from([1, 2, 3]), st.sampled_from([1, 2, 3]))
def test_heisenberg_commutator(x, y, m, n):
    f = fr("A2")
    a, b = (x, 1), (1, y)
    v = FockVector.monomial(f, [(0, -1), (1, -2)], point=(1, -1))
    for s in (1, -1):
        lhs = apply_mode(a, s * m, apply_mode(b, -s * n, v)) - apply_mode(b, -s * n, apply_mode(a, s * m, v))
        rhs = v * (s * m * f.inner(a, b)) if m == n else v * 0
        assert lhs == rhs


# vertex operators -------------------------------------------------------------

def test_vacuum_vertex_operator_is_identity():
    f = fr("A2")
    e = FockVector.monomial(f, [(1, -1)], point=(1, 0))
    vac = FockVector.vacuum(f)
    for n in range(-3, 3):
        out = vertex_coefficient(vac, n, e)
        assert out == (e if n == -1 else e * 0)


@pytest.mark.parametrize("a,b", [((1, 0), (0, 1)), ((1, 1), (-1, 0)), ((0, 1), (1, 1))])
def test_root_vertex_operators(a, b):
    f = fr("A2")
    ea, eb = FockVector.vacuum(f, a), FockVector.vacuum(f, b)
    ab = f.inner(a, b)
    out = vertex_coefficient(ea, 0, eb)
    if ab == -1:
        s = tuple(x + y for x, y in zip(a, b))
        assert out == FockVector.vacuum(f, s) * f.cocycle_value(a, b)
    else:
        assert out.is_zero()


def test_vertex_operator_of_h_is_the_mode():
    f = fr("A2")
    h = FockVector.monomial(f, [(0, -1)])
    v = FockVector.monomial(f, [(1, -1)], point=(1, -1))
    for n in range(-2, 3):
        assert vertex_coefficient(h, n, v) == apply_mode((1, 0), n, v)


# Virasoro -------------------------------------------------------------------

def test_l0_on_exponentials():
    f = fr("E8")
    a = root_system("E8").highest_root
    assert apply_virasoro(0, FockVector.vacuum(f, a)) == FockVector.vacuum(f, a)


def test_l1_on_weight_one_states():
    f = fr("A2")
    h = (1, 2)
    assert apply_virasoro(1, apply_mode(h, -1, FockVector.vacuum(f))).is_zero()
    a = (1, 0)
    v = apply_mode(h, -1, FockVector.vacuum(f, a))
    assert apply_virasoro(1, v) == FockVector.vacuum(f, a) * f.inner(h, a)


@given(st.sampled_from(basis_states("II11+A1", (1, 0, 1), 2)), st.integers(-3, 3), st.integers(-3, 3))
def test_virasoro_relations(v, m, n):
    d = v.frame.d
    lhs = apply_virasoro(m, apply_virasoro(n, v)) - apply_virasoro(n, apply_virasoro(m, v))
    rhs = apply_virasoro(m + n, v) * (m - n)
    if m + n == 0:
        rhs = rhs + v * Fraction((m**3 - m) * d, 12)
    assert lhs == rhs


# contravariant form -----------------------------------------------------------

def test_form_values():
    f = fr("A2")
    vac = FockVector.vacuum(f)
    assert bilinear_form(vac, vac) == 1
    for h in [(1, 0), (1, 1), (2, -1)]:
        x = apply_mode(h, -1, vac)
        assert bilinear_form(x, x) == f.inner(h, h)
        y = apply_mode(h, -2, vac)
        assert bilinear_form(y, y) == 2 * f.inner(h, h)


@given(st.sampled_from(basis_states("II11+A1", (1, -1, 0), 2)),
       st.sampled_from(basis_states("II11+A1", (1, -1, 0), 3)), st.integers(1, 3))
def test_virasoro_adjointness(u, v, n):
    assert bilinear_form(apply_virasoro(n, u), v) == bilinear_form(u, apply_virasoro(-n, v))


def test_form_is_symmetric():
    states = basis_states("II11+A1", (0, 1, 1), 2)
    mixed = [states[i] + states[-1 - i] * 3 for i in range(len(states))]
    for u in mixed:
        for v in mixed[:5]:
            assert bilinear_form(u, v) == bilinear_form(v, u)


# physical states ----------------------------------------------------------------

def test_root_is_physical():
    pb = physical_basis("A2+II11", (1, 0, 0, 0), 1)
    assert pb.dim == 1 and pb.vectors[0] == FockVector.vacuum(fr("A2+II11"), (1, 0, 0, 0))


def test_ii25_1_norm_zero_grade():
    L = build_lattice("E8^3+II11")
    e = [0] * 24 + [1, 0]
    pb = physical_basis(L, e, 1)
    assert pb.dim == 25
    assert all(is_physical(v, 1) for v in pb.vectors)
    assert radical_split(pb)[0] == 24
    assert quotient_dimension(L, e, 1) == 24


def test_empty_grades():
    assert physical_basis("A2", (1, 1), 0).dim == 0
    assert quotient_dimension("A2", (1, 1), 0) == 0


def test_radical_split_edge_cases():
    assert radical_split(PhysicalBasis(((), 1), [], [], 0)) == (0, [])
    q, nulls = radical_split([[0, 0], [0, 0]])
    assert q == 0 and len(nulls) == 2
    assert radical_split([[2, 1], [1, 2]]) == (2, [])


def test_bracket_with_cartan_element():
    f = fr("A2+II11")
    for h in [(1, 0, 0, 0), (0, 1, 1, 0)]:
        for a in [(1, 0, 0, 0), (1, 1, 0, 0)]:
            u = apply_mode(h, -1, FockVector.vacuum(f))
            ea = FockVector.vacuum(f, a)
            assert bracket_p1(u, ea) == ea * f.inner(h, a)


def test_bracket_of_roots():
    f = fr("A2")
    a, b = (1, 0), (0, 1)
    ea, eb = FockVector.vacuum(f, a), FockVector.vacuum(f, b)
    assert bracket_p1(ea, eb) == FockVector.vacuum(f, (1, 1)) * f.cocycle_value(a, b)
    assert bracket_p1(ea, eb) == -bracket_p1(eb, ea)
    assert bracket_p1(ea, FockVector.vacuum(f, (1, 1))).is_zero()  # pairing +1
    assert bracket_p1(ea, ea).is_zero()


def test_bracket_rejects_unphysical():
    f = fr("A2")
    with pytest.raises(ValueError):
        bracket_p1(FockVector.vacuum(f, (1, 1)), FockVector.vacuum(f))


def test_bracket_budget():
    f = fr("A2")
    with pytest.raises(BudgetError):
        bracket_p1(FockVector.vacuum(f, (1, 0)), FockVector.vacuum(f, (-1, 0)), weight_budget=0)


# DDF operators -------------------------------------------------------------------

def ddf_states():
    f = fr(DDF_LATTICE)
    ea = FockVector.vacuum(f, ALPHA)
    return [ea, ddf_A(A2, -1, C, ea), ddf_A(A1, -2, C, ddf_A(A2, -1, C, ea)),
            apply_mode(A1, -1, ea)]


def test_ddf_annihilates_ground_state():
    ea = ddf_states()[0]
    for m in (1, 2, 3):
        assert ddf_A(A1, m, C, ea).is_zero()


@pytest.mark.parametrize("m", [1, 2])
def test_ddf_heisenberg(m):
    f = fr(DDF_LATTICE)
    for v in ddf_states():
        for x in (A1, A2):
            for y in (A1, A2):
                lhs = ddf_A(x, m, C, ddf_A(y, -m, C, v)) - ddf_A(y, -m, C, ddf_A(x, m, C, v))
                assert lhs == v * (m * f.inner(x, y))


def test_ddf_commutes_with_virasoro():
    for v in ddf_states():
        for n in (-1, 1, 2):
            for m in (-1, 2):
                w1 = apply_virasoro(n, ddf_A(A1, m, C, v))
                w2 = ddf_A(A1, m, C, apply_virasoro(n, v))
                assert w1 == w2


def test_ddf_rejects_bad_c():
    f = fr(DDF_LATTICE)
    with pytest.raises(ValueError):
        ddf_A(A1, 1, (1, 1, 0, 0), FockVector.vacuum(f, ALPHA))


def test_transverse_basis_ground_state():
    pb = transverse_basis("A2+II11", (1, 0, 0, 1), (0, 0, 1, 0))
    assert pb.vectors == [FockVector.vacuum(fr("A2+II11"), (1, 0, 0, 1))]


def test_transverse_basis_ii25_1():
    L = build_lattice("E8^3+II11")
    alpha = [0] * 24 + [1, 0]
    c = [0] * 24 + [0, 1]
    pb = transverse_basis(L, alpha, c, count_target=24)
    assert pb.dim == 24
    assert all(is_physical(v, 1) for v in pb.vectors)
    assert sympy.Matrix(pb.gram).is_positive_definite


def test_longitudinal_commutes_with_virasoro():
    for v in ddf_states()[:3]:
        for m in (-1, 1, 2):
            for n in (1, 2):
                lhs = apply_virasoro(n, longitudinal_L(m, ALPHA, C, v))
                rhs = longitudinal_L(m, ALPHA, C, apply_virasoro(n, v))
                assert lhs == rhs


def test_longitudinal_lowering_is_a_virasoro_descendant():
    # e^alpha with alpha^2 = 2 is physical of weight one
    f = fr(DDF_LATTICE)
    alpha = (0, 1, 1, 0)
    got = longitudinal_L(-1, alpha, C, FockVector.vacuum(f, alpha))
    shifted = tuple(a - c for a, c in zip(alpha, C))
    assert got == -apply_virasoro(-1, FockVector.vacuum(f, shifted))


@pytest.mark.parametrize("alpha", [(0, 1, 1, 0), (0, 1, 0, 0), (-1, 1, 0, 0)])
@pytest.mark.parametrize("m", [1, 2])
def test_longitudinal_central_term_measured(alpha, m):
    # what actually holds: 2m Lf_0 + 2m^3 + (alpha, alpha) m
    f = fr(DDF_LATTICE)
    ea = FockVector.vacuum(f, alpha)
    states = [ea, apply_mode(C, -1, ea), apply_mode((0, 0, 1, 1), -2, ea)]
    for v in states:
        Lm = lambda w: longitudinal_L(m, alpha, C, w)
        Ln = lambda w: longitudinal_L(-m, alpha, C, w)
        lhs = Lm(Ln(v)) - Ln(Lm(v))
        central = 2 * m**3 + f.inner(alpha, alpha) * m
        assert lhs == longitudinal_L(0, alpha, C, v) * (2 * m) + v * central


def test_json_roundtrip():
    v = ddf_states()[2] * Fraction(3, 7)
    assert FockVector.from_json(v.to_json()) == v
