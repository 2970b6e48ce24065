from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from latvoa.fock import bilinear_form, frame_for, radical_split
from latvoa.lattice import ii22_coords
from latvoa.series import ns_multiplicity_series, partitions_colored
from latvoa.superfock import (
    SuperVector,
    apply_fermion_mode,
    apply_G,
    apply_G_pm,
    apply_J,
    apply_super_operator,
    apply_super_virasoro,
    ddf_A_ns,
    ddf_B_ns,
    is_physical_n2,
    n2_bracket,
    n2_frame,
    n2_lower_bound_basis,
    n2_tilde_dimension,
    ns_bracket,
    physical_basis_n2,
    physical_basis_ns,
    transverse_basis_ns,
)

HALF = Fraction(1, 2)
NAME = "A2+II11"
DDF = "II11+A2"
C, ALPHA = (1, 0, 0, 0), (0, 1, 0, 0)
A1, A2 = (0, 0, 1, 0), (0, 0, 0, 1)


def fr(name=NAME):
    return frame_for(name)


def sample_states():
    f = fr()
    return [
        SuperVector.vacuum(f, (0, 0, 0, 0)),
        SuperVector.vacuum(f, (1, 0, 1, 0)),
        SuperVector.monomial(f, [(0, -1)], point=(0, 1, 0, 0), fmodes=[(2, -HALF)]),
        SuperVector.monomial(f, [], point=(1, -1, 0, 1), fmodes=[(0, -HALF), (3, -Fraction(3, 2))]),
    ]


def comm(A, B, v, anti=False):
    return A(B(v)) + B(A(v)) if anti else A(B(v)) - B(A(v))


basis4 = st.sampled_from([(1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1), (1, -1, 2, 0)])
halves = st.sampled_from([Fraction(k, 2) for k in (-3, -1, 1, 3)])


@given(basis4, basis4, halves, halves, st.integers(0, 3))
def test_fermion_anticommutator(a, b, r, s, i):
    v = sample_states()[i]
    f = v.frame
    lhs = comm(lambda w: apply_fermion_mode(a, r, w), lambda w: apply_fermion_mode(b, s, w), v, anti=True)
    want = v * f.inner(a, b) if r + s == 0 else v * 0
    assert lhs == want


def test_fermion_creation_is_exterior():
    v = SuperVector.vacuum(fr(), (0, 1, 0, 0))
    a, b = (0, 0, 1, 0), (1, 0, 0, 0)
    twice = apply_fermion_mode(a, -HALF, apply_fermion_mode(a, -HALF, v))
    assert twice.is_zero()
    ab = apply_fermion_mode(a, -HALF, apply_fermion_mode(b, -HALF, v))
    ba = apply_fermion_mode(b, -HALF, apply_fermion_mode(a, -HALF, v))
    assert ab == -ba and not ab.is_zero()


def test_l0_on_a_fermion_over_an_exponential():
    f = fr()
    point = (1, 0, 1, 0)
    v = apply_fermion_mode((0, 0, 1, 0), -HALF, SuperVector.vacuum(f, point))
    assert apply_super_virasoro(0, v) == v * (f.inner(point, point) / 2 + HALF)


@pytest.mark.parametrize("i", range(4))
def test_g_half_anticommutator_is_twice_l0(i):
    v = sample_states()[i]
    lhs = comm(lambda w: apply_G(HALF, w), lambda w: apply_G(-HALF, w), v, anti=True)
    assert lhs == apply_super_virasoro(0, v) * 2


@pytest.mark.parametrize("m,r", [(1, HALF), (-1, HALF), (2, -Fraction(3, 2)), (0, HALF)])
def test_l_g_commutator(m, r):
    for v in sample_states():
        lhs = comm(lambda w: apply_super_virasoro(m, w), lambda w: apply_G(r, w), v)
        assert lhs == apply_G(r + m, v) * (Fraction(m, 2) - r)


def test_n2_frame_of_ii22():
    f = fr("II22")
    nf = n2_frame(f.lattice)
    assert len(nf.plus) == 2
    for hp, hm in zip(nf.plus, nf.minus):
        assert f.inner(hp, hm) == 1 and f.inner(hp, hp) == 0
    with pytest.raises(ValueError):
        n2_frame(frame_for("A2").lattice)


@pytest.mark.parametrize("r,s", [(HALF, -HALF), (Fraction(3, 2), -Fraction(3, 2)), (HALF, HALF), (-HALF, Fraction(3, 2))])
def test_n2_g_plus_g_minus(r, s):
    f = fr("II22")
    nf = n2_frame(f.lattice)
    states = [SuperVector.vacuum(f, (1, 0, 0, 0)),
              SuperVector.monomial(f, [(1, -1)], point=(0, 0, 1, 0), fmodes=[(3, -HALF)])]
    for v in states:
        lhs = comm(lambda w: apply_G_pm(1, r, w, nf), lambda w: apply_G_pm(-1, s, w, nf), v, anti=True)
        n = int(r + s)
        rhs = apply_super_virasoro(n, v) + apply_J(n, v, nf) * ((r - s) / 2)
        if n == 0:
            rhs = rhs + v * (Fraction(6, 6) * (r * r - Fraction(1, 4)))
        assert lhs == rhs


def test_dispatch_names():
    v = sample_states()[2]
    assert apply_super_operator("L", 0, v) == apply_super_virasoro(0, v)
    assert apply_super_operator("G", HALF, v) == apply_G(HALF, v)
    with pytest.raises(ValueError):
        apply_super_operator("X", 0, v)


# N=1 physical states ---------------------------------------------------------

def test_ns_weight_half_multiplicity_rank10():
    pb = physical_basis_ns("E8+II11", [0] * 8 + [1, 0], HALF)
    assert pb.dim == 9
    assert radical_split(pb)[0] == ns_multiplicity_series(1)[HALF] == 8


def test_ns_norm_two_has_nothing_at_weight_half():
    pb = physical_basis_ns("E8+II11", [0] * 8 + [1, 1], HALF)
    assert pb.dim == 0


def test_ns_bracket_of_a_cartan_fermion():
    # u = psi_h(-1/2) e^0 acts through h(0) on physical states
    f = fr("E8+II11")
    h = [0] * 9 + [1]
    beta = [0] * 8 + [1, 0]
    u = apply_fermion_mode(h, -HALF, SuperVector.vacuum(f, [0] * 10))
    v = apply_fermion_mode([1] + [0] * 9, -HALF, SuperVector.vacuum(f, beta))
    assert ns_bracket(u, v) == v * f.inner(h, beta)
    with pytest.raises(ValueError):
        ns_bracket(u, SuperVector.vacuum(f, [0] * 8 + [1, 1]))


def test_ns_ddf_relations():
    f = fr(DDF)
    v0 = SuperVector.vacuum(f, ALPHA)
    for x in (A1, A2):
        assert ddf_A_ns(x, 1, C, v0).is_zero()
        assert ddf_B_ns(x, HALF, C, v0).is_zero()
    for x in (A1, A2):
        for y in (A1, A2):
            got = comm(lambda w: ddf_B_ns(x, HALF, C, w), lambda w: ddf_B_ns(y, -HALF, C, w), v0, anti=True)
            assert got == v0 * f.inner(x, y)
            got = comm(lambda w: ddf_A_ns(x, 1, C, w), lambda w: ddf_A_ns(y, -1, C, w), v0)
            assert got == v0 * f.inner(x, y)
    with pytest.raises(ValueError):
        ddf_B_ns(A1, 1, C, v0)


def test_ns_ddf_states_are_physical():
    f = fr(DDF)
    # ground state over alpha + c/2 has norm 1, hence weight 1/2
    v0 = SuperVector.vacuum(f, (HALF, 1, 0, 0))
    assert apply_super_virasoro(0, v0) == v0 * HALF
    w = ddf_B_ns(A1, -HALF, C, v0)
    assert not w.is_zero()
    assert apply_G(HALF, w).is_zero() and apply_G(Fraction(3, 2), w).is_zero()
    assert apply_super_virasoro(0, w) == w * HALF


def test_transverse_basis_ns_ground_state():
    pb = transverse_basis_ns(DDF, ALPHA, C, [A1, A2])
    assert len(pb.vectors) == 2
    assert pb.gram == [[2, -1], [-1, 2]]  # the A2 form on the transverse space
    with pytest.raises(ValueError):
        transverse_basis_ns(DDF, (0, 1, 1, 0), C, [A1, A2])


# N=2 -------------------------------------------------------------------------

def test_n2_norm_zero_is_the_exponential():
    for a in [(0, 0, 0, 0), (1, 0, 0, 0)]:
        alpha = ii22_coords(*a)
        pb = physical_basis_n2("II22", alpha)
        assert pb.dim == 1
        assert pb.vectors[0].terms.keys() == SuperVector.vacuum(fr("II22"), alpha).terms.keys()


def test_n2_positive_norm_is_empty():
    assert physical_basis_n2("II22", ii22_coords(1, 0, 1, 0)).dim == 0


def test_n2_bracket_vanishes_for_paired_points():
    f = fr("II22")
    a, b = ii22_coords(1, 0, 0, 0), ii22_coords(0, 0, 1, 0)
    assert f.inner(a, b) != 0
    u, v = SuperVector.vacuum(f, a), SuperVector.vacuum(f, b)
    assert is_physical_n2(u) and is_physical_n2(v)
    res = n2_bracket(u, v)
    target = physical_basis_n2("II22", [x + y for x, y in zip(a, b)], with_gram=False).vectors
    assert all(bilinear_form(res, w) == 0 for w in target)


def test_n2_bracket_rejects_non_physical():
    f = fr("II22")
    with pytest.raises(ValueError):
        n2_bracket(SuperVector.vacuum(f, ii22_coords(1, 0, 1, 0)), SuperVector.vacuum(f, (0, 0, 0, 0)))


@pytest.mark.parametrize("M", [1, 2, 3])
def test_n2_lower_bound_rank(M):
    vs = n2_lower_bound_basis("II22", ii22_coords(1, 0, -M, 0))
    keys = sorted({k for v in vs for k in v.terms}, key=repr)
    from latvoa.linalg import rank
    assert rank([[v.terms.get(k, 0) for k in keys] for v in vs]) == len(vs) == partitions_colored(1, 4)[M]


@pytest.mark.parametrize("coords,want", [((0, 0, 0, 0), 1), ((1, 0, 0, 0), 1), ((1, 0, -1, 0), 1),
                                         ((1, 0, -2, 0), 3), ((1, 1, -1, -1), 3), ((1, 0, -3, 0), 6)])
def test_n2_tilde_dimension(coords, want):
    assert n2_tilde_dimension("II22", ii22_coords(*coords)) == want


def test_n2_radical_quotient_vanishes_at_negative_norm():
    pb = physical_basis_n2("II22", ii22_coords(1, 0, -1, 0))
    assert pb.dim == 3
    assert radical_split(pb)[0] == 0
