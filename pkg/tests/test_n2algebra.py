from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from latvoa.lattice import ii22, ii22_coords
from latvoa.n2algebra import (
    N2Element,
    N2Point,
    classify,
    component_basis,
    epsilon,
    g2_bracket,
    moebius,
    pairing,
    plus_minus_pairing,
    sl2_left,
    sl2_right,
    ur_vr,
)

RATS = [Fraction(1), Fraction(1, 2), Fraction(2), Fraction(-1), Fraction(-3, 5), Fraction(7, 4)]


def test_ur_vr_shapes():
    u, v = ur_vr(Fraction(2, 3))
    assert u.m == ((2, 3), (0, 0)) and v.m == ((0, 0), (2, 3))
    assert ur_vr((2, 3)) == (u, v)
    with pytest.raises(ValueError):
        ur_vr(0)
    with pytest.raises(ValueError):
        ur_vr((2, 4))
    with pytest.raises(ValueError):
        N2Point([[1, 1], [1, 2]])


@pytest.mark.parametrize("r", RATS)
def test_pairings_of_a_component(r):
    u, v = ur_vr(r)
    p, q = r.numerator, r.denominator
    assert pairing(u, v) == pairing(u, u) == pairing(v, v) == 0
    assert plus_minus_pairing(u, v) == p * q
    assert plus_minus_pairing(v, u) == -p * q


def test_unit_slopes():
    u1, v1 = ur_vr(1)
    um, vm = ur_vr(-1)
    assert plus_minus_pairing(u1, v1) == 1
    assert plus_minus_pairing(um, vm) == -1


@pytest.mark.parametrize("r", RATS)
def test_bracket_within_a_component(r):
    u, v = ur_vr(r)
    got = g2_bracket(N2Element.basis(u), N2Element.basis(v))
    assert got == N2Element.basis(u + v, r.numerator * r.denominator * epsilon(u, v))
    assert epsilon(u, v) == 1


@pytest.mark.parametrize("r,s", [(1, 2), (Fraction(1, 2), -1), (3, Fraction(-3, 5))])
def test_different_components_commute(r, s):
    ur, vr = ur_vr(r)
    us, vs = ur_vr(s)
    for a in (ur, vr):
        for b in (us, vs):
            assert g2_bracket(N2Element.basis(a), N2Element.basis(b)).is_zero()


def test_bracket_is_antisymmetric_on_samples():
    pts = [x for r in RATS for x in ur_vr(r)]
    for a in pts:
        for b in pts:
            x, y = N2Element.basis(a), N2Element.basis(b)
            assert g2_bracket(x, y) == g2_bracket(y, x) * -1


@pytest.mark.parametrize("m,tag", [
    ([[0, 0], [0, 0]], "center"),
    ([[0, 0], [3, 5]], ("A", Fraction(3, 5))),
    ([[0, 0], [0, 5]], "A0"),
    ([[4, 0], [-2, 0]], "Ainf"),
    ([[2, 6], [1, 3]], ("A", Fraction(1, 3))),
])
def test_classify(m, tag):
    assert classify(N2Point(m)) == tag


def test_classify_of_ur_and_component_basis():
    for r in RATS:
        u, v = ur_vr(r)
        assert classify(u) == classify(v) == classify(2 * u + -3 * v) == ("A", r)
        assert component_basis(2 * u + -3 * v) == (2, -3)
    assert component_basis(N2Point([[0, 0], [0, 1]])) is None


def test_lattice_coordinates_agree_with_ii22():
    L = ii22()
    pts = [x for r in RATS for x in ur_vr(r)] + [N2Point([[0, 3], [0, 5]])]
    for a in pts:
        assert N2Point.from_lattice(a.to_lattice()) == a
        assert L.norm(a.to_lattice()) == 0
        for b in pts:
            assert L.inner(a.to_lattice(), b.to_lattice()) == pairing(a, b)
    assert N2Point.from_abcd(1, 2, 0, 0).to_lattice() == tuple(ii22_coords(1, 2, 0, 0))


S, T = ((0, -1), (1, 0)), ((1, 1), (0, 1))


def slope_tag(r):
    if r is None:
        return "Ainf"
    return "A0" if r == 0 else ("A", r)


def test_sl2_identity():
    x = N2Element.basis(ur_vr(Fraction(2, 3))[0], 5)
    assert sl2_left(((1, 0), (0, 1)), x) == x == sl2_right(((1, 0), (0, 1)), x)
    with pytest.raises(ValueError):
        sl2_left(((2, 0), (0, 1)), x)


words = st.lists(st.sampled_from([S, T]), max_size=6)


def _product(word):
    M = ((1, 0), (0, 1))
    for G in word:
        M = tuple(tuple(sum(M[i][k] * G[k][j] for k in range(2)) for j in range(2)) for i in range(2))
    return M


elements = st.lists(
    st.tuples(st.sampled_from(RATS), st.integers(-2, 2), st.integers(-2, 2), st.integers(-3, 3)),
    min_size=1, max_size=3,
).map(lambda ts: sum((N2Element.basis(m * ur_vr(r)[0] + n * ur_vr(r)[1], c) for r, m, n, c in ts), N2Element()))


@given(words, elements, elements)
def test_left_action_is_a_homomorphism(word, x, y):
    M = _product(word)
    assert sl2_left(M, g2_bracket(x, y)) == g2_bracket(sl2_left(M, x), sl2_left(M, y))


def test_right_s_moves_u1_to_u_minus_1():
    u1 = ur_vr(1)[0]
    (lam,) = sl2_right(S, N2Element.basis(u1)).terms
    assert classify(lam) == ("A", Fraction(-1))
    assert lam == ur_vr(-1)[0]


@given(words, st.sampled_from(RATS))
def test_right_action_follows_moebius(word, r):
    M = _product(word)
    (lam,) = sl2_right(M, N2Element.basis(ur_vr(r)[0])).terms
    rp = moebius(M, r)
    assert classify(lam) == slope_tag(rp)


def test_moebius_values():
    assert moebius(S, 2) == Fraction(-1, 2)
    assert moebius(T, Fraction(1, 3)) == Fraction(4, 3)
    assert moebius(S, 0) is None


def test_json():
    x = N2Element.basis(ur_vr(1)[0], Fraction(1, 3))
    assert '"coef": "1/3"' in x.to_json()
