import json
from collections import Counter
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from latvoa.lattice import (
    IntegralLattice,
    LatticeVector,
    affine_cartan,
    build_lattice,
    cocycle,
    direct_sum,
    glue,
    hyperbolic,
    ii22,
    ii22_coords,
    jacobi_theta_specialized,
    lattice_from_json,
    leech,
    root_system,
    short_vectors,
    theta_series,
    vector_histogram,
)
from latvoa.series import eisenstein

from oracles import box_vectors, euler_product


def test_hyperbolic_gram():
    assert hyperbolic().gram == ((0, 1), (1, 0))
    assert hyperbolic().signature == (1, 1, 0)


def test_e8_cubed():
    L = build_lattice("E8^3")
    assert L.rank == 24
    assert abs(L.det) == 1
    assert L.is_even and L.is_positive_definite


def test_ii25_1_signature():
    L = build_lattice("E8^3+II11")
    assert L.signature == (25, 1, 0)
    assert L.is_unimodular and L.is_even


def test_ii22_coordinates():
    L = ii22()
    r1, r2 = ii22_coords(1, 0, 0, 0), ii22_coords(0, 1, 0, 0)
    p1, p2 = ii22_coords(0, 0, 1, 0), ii22_coords(0, 0, 0, 1)
    assert [L.inner(r1, p1), L.inner(r2, p2), L.inner(r1, p2), L.inner(r1, r2)] == [1, 1, 0, 0]
    assert L.norm(ii22_coords(1, 0, -3, 0)) == -6


def test_gram_validation():
    with pytest.raises(ValueError):
        IntegralLattice([[1, 2], [3, 1]])
    with pytest.raises(ValueError):
        IntegralLattice([[Fraction(1, 2)]])
    with pytest.raises(ValueError):
        build_lattice("F4")


def test_leech_basics():
    L = leech()
    assert L.rank == 24 and L.det == 1 and L.is_even
    assert short_vectors(L, 2) == []


def test_leech_theta_against_modular_forms():
    # Theta_Leech = E4^3 - 720 Delta
    order = 4
    th = theta_series(leech(), order)
    e4 = eisenstein(4, order)
    delta = [0] + euler_product(24, order)[: order - 1]
    oracle = [(e4**3)[n] - 720 * delta[n] for n in range(order)]
    assert [th[n] for n in range(order)] == oracle
    assert th[2] == 196560


def test_short_vectors_small_cases():
    assert len(short_vectors(build_lattice("A1"), 2)) == 2
    assert len(short_vectors(build_lattice("E8"), 2)) == 240


@pytest.mark.parametrize("name,bound", [("A2", 4), ("A1+A1", 4), ("A3", 3)])
def test_short_vectors_against_box_search(name, bound):
    L = build_lattice(name)
    got = Counter(tuple(int(x) for x in v) for v in short_vectors(L, 8))
    want = Counter(box_vectors(L.gram, bound, 8))
    assert got == want


def test_theta_e8_is_e4():
    assert theta_series(build_lattice("E8"), 5) == eisenstein(4, 5)


def test_theta_a1():
    th = theta_series(build_lattice("A1"), 10)
    assert [th[n] for n in range(10)] == [1, 2, 0, 0, 2, 0, 0, 0, 0, 2]


def test_histogram_matches_short_vectors():
    rs = root_system("D4")
    L = rs.lattice
    v0 = rs.simple_roots[1]
    hist = vector_histogram(L, 6, v0)
    oracle = Counter({(0, Fraction(0)): 1})
    for v in short_vectors(L, 6):
        oracle[(int(L.norm(v)), L.inner(v, v0))] += 1
    assert hist == dict(oracle)


def test_jacobi_theta_a1():
    rs = root_system("A1")
    f = jacobi_theta_specialized(rs.lattice, rs.simple_roots[0], 5)
    assert f.coeff(0, 0) == 1
    assert f.coeff(1, 2) == f.coeff(1, -2) == 1
    assert f.coeff(4, 4) == f.coeff(4, -4) == 1
    assert len(f) == 5


def test_jacobi_theta_zero_vector_collapses():
    L = build_lattice("E8")
    f = jacobi_theta_specialized(L, L.zero(), 3)
    th = theta_series(L, 3)
    assert {k[0]: c for k, c in f.terms.items()} == {k[0]: c for k, c in th.terms.items()}


@given(st.lists(st.integers(-2, 2), min_size=2, max_size=2))
def test_jacobi_theta_symmetric(v0):
    L = build_lattice("A2")
    f = jacobi_theta_specialized(L, v0, 4)
    assert all(f.coeff2((e[0], -e[1])) == c for e, c in f.terms.items())


def test_glue_d8_to_e8():
    base = build_lattice("D8")
    spinor = base.dual_coords([0] * 7 + [1])
    assert base.norm(spinor) == 2
    E8 = glue(base, [spinor], "E8")
    assert abs(E8.det) == 1 and E8.is_even
    assert len(short_vectors(E8, 2)) == 240
    with pytest.raises(ValueError):
        glue(base, [[Fraction(1, 3)] + [0] * 7])


def test_json_lattice_roundtrip(tmp_path):
    base = build_lattice("D8")
    spinor = base.dual_coords([0] * 7 + [1])
    data = {"gram": [list(r) for r in base.gram], "glue": [[str(x) for x in spinor]], "label": "E8"}
    L = lattice_from_json(json.dumps(data))
    assert abs(L.det) == 1
    assert json.loads(L.to_json())["gram"] == [list(r) for r in L.gram]


# cocycle ------------------------------------------------------------------

vectors4 = st.lists(st.integers(-3, 3), min_size=4, max_size=4)


@pytest.mark.parametrize("name", ["II22", "A2+II11", "A4"])
@given(a=vectors4, b=vectors4, c=vectors4)
def test_cocycle_axioms(name, a, b, c):
    L = build_lattice(name)
    eps = cocycle(L)
    assert eps(L.zero(), a) == eps(a, L.zero()) == 1
    assert eps(a, [-x for x in a]) == (-1) ** int(L.norm(a) / 2)
    assert eps(a, b) == (-1) ** int(L.inner(a, b)) * eps(b, a)
    ab, bc = [x + y for x, y in zip(a, b)], [x + y for x, y in zip(b, c)]
    assert eps(a, b) * eps(ab, c) == eps(a, bc) * eps(b, c)
    assert eps.check(a, b, c)


def test_cocycle_is_bimultiplicative():
    L = build_lattice("E8")
    eps = cocycle(L)
    basis = [L.basis_vector(i) for i in range(8)]
    for x in basis:
        for y in basis:
            for z in basis:
                assert eps(x + y, z) == eps(x, z) * eps(y, z)


def test_cocycle_rejects_odd_lattice():
    with pytest.raises(ValueError):
        cocycle(IntegralLattice([[1]]))


# root systems ---------------------------------------------------------------

def test_root_system_counts():
    a1 = root_system("A1")
    assert len(a1.positive_roots) == 1 and a1.coxeter_number == 2
    e8 = root_system("E8")
    assert len(e8.positive_roots) == 120 and e8.coxeter_number == 30
    assert len(e8.roots) == 8 * e8.coxeter_number
    assert root_system("A2").highest_root == LatticeVector([1, 1])


@pytest.mark.parametrize("name", ["A5", "D6", "E6", "E7", "E8"])
def test_roots_are_the_norm_two_vectors(name):
    rs = root_system(name)
    found = {v for v in short_vectors(rs.lattice, 2)}
    assert found == set(rs.roots)


def test_weyl_vector_pairs_to_one_with_simple_roots():
    rs = root_system("E8^3")
    for a in rs.simple_roots:
        assert rs.lattice.inner(rs.weyl_vector, a) == 1


def test_affine_cartan():
    assert affine_cartan(root_system("A1")) == [[2, -2], [-2, 2]]
    assert affine_cartan(root_system("A2")) == [[2, -1, -1], [-1, 2, -1], [-1, -1, 2]]
    for name in ("D5", "E7"):
        m = affine_cartan(root_system(name))
        assert all(m[i][i] == 2 for i in range(len(m)))
    with pytest.raises(ValueError):
        affine_cartan(root_system("A1^2"))


def test_direct_sum_components():
    L = direct_sum(build_lattice("A1"), build_lattice("E8"))
    assert L.rank == 9 and len(L.components) == 2
