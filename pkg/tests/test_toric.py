from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from reeb_index import toric
from reeb_index.errors import (
    NonPrimitiveNormal,
    NotInInteriorDualCone,
    NotInSubgroupK,
    NotIntegralBasisCompletable,
    NotStrictlyConvex,
    RedundantNormal,
    SchemaError,
    UnsupportedCone,
)
from reeb_index.surd import LinearSurd, SurdRatio


def cone(normals):
    return toric.MomentCone.from_json({"dim": len(normals[0]), "normals": normals})


def ranks(table, top):
    return [table.rank(d) for d in range(top + 1)]


def test_sphere_cone_normals():
    assert toric.sphere_cone(1).normals == ((1, 0), (-1, 1))
    assert toric.sphere_cone(2).normals == ((1, 0, 0), (0, 1, 0), (-1, -1, 1))


@pytest.mark.parametrize("n", [1, 2, 3])
def test_sphere_cones_are_good_and_simply_connected(n):
    c = toric.sphere_cone(n)
    faces = toric.check_good_cone(c)
    assert len(faces.edges) == n + 1
    assert toric.fundamental_group(c) == ()


@pytest.mark.parametrize("k", [0, 1, 2, 3])
def test_ck_cones(k):
    c = toric.ck_cone(k)
    assert c.normals == ((1, 0, 1), (0, -1, 1), (0, k, 1), (-1, 2 * k - 1, 1))
    assert len(toric.check_good_cone(c).edges) == 4
    assert toric.fundamental_group(c) == ()


def test_index_two_sublattice():
    # Smith form of [[2, 1], [0, 1]] is diag(1, 2)
    assert toric.fundamental_group(cone([[2, 1], [0, 1]])) == (2,)


@pytest.mark.parametrize(
    "normals, error",
    [
        ([[2, 0], [0, 1]], NonPrimitiveNormal),
        ([[1, 0], [0, 1], [1, 1]], RedundantNormal),
        ([[1, 0], [-1, 0]], NotStrictlyConvex),
        ([[1, 0, 1], [-1, 0, 1], [0, 1, 1]], NotIntegralBasisCompletable),
    ],
)
def test_bad_cones(normals, error):
    with pytest.raises(error):
        toric.check_good_cone(cone(normals))


def test_cone_schema():
    with pytest.raises(SchemaError):
        toric.MomentCone.from_json({"dim": 2, "normals": [[1, 0]], "extra": 1})
    with pytest.raises(SchemaError):
        toric.MomentCone.from_json({"dim": 3, "normals": [[1, 0]]})


def test_reeb_vector_sum_of_normals():
    c = toric.sphere_cone(2)
    r = toric.is_reeb_vector(c, coefficients=[1, 1, 1])
    assert [str(a) for a in r.coefficients] == ["1", "1", "1"]
    assert [str(x) for x in r.vector] == ["0", "0", "1"]


def test_reeb_vector_of_c1():
    # (1,0,1) + (0,-1,1) + (0,1,1) + (-1,1,1)
    r = toric.is_reeb_vector(toric.ck_cone(1), vector=[0, 1, 4])
    assert r.to_json()["coefficients"] == ["1", "1", "1", "1"]


def test_reeb_vector_outside_dual_cone():
    with pytest.raises(NotInInteriorDualCone):
        toric.is_reeb_vector(toric.sphere_cone(1), vector=[0, -1])


def test_sphere_edge_rotations():
    c = toric.sphere_cone(1)
    faces = toric.check_good_cone(c)
    r = toric.is_reeb_vector(c, coefficients=[1, 1], faces=faces)
    for e in faces.edges:
        rot = toric.edge_orbit_rotations(c, faces, r, e)
        assert rot.rotations == (1, 1)
        assert not rot.nondegenerate
        assert toric.orbit_rs_index(rot, 1).mu_rs == 4


def test_irrational_reeb_gives_nondegenerate_orbits():
    c = toric.sphere_cone(1)
    faces = toric.check_good_cone(c)
    r = toric.is_reeb_vector(c, coefficients=[1, LinearSurd.sqrt(2)], faces=faces)
    found = []
    for e in faces.edges:
        rot = toric.edge_orbit_rotations(c, faces, r, e)
        assert rot.nondegenerate
        found.append(sorted(float(x) for x in rot.rotations))
    # ratios 1 : sqrt(2) and 1 : 1/sqrt(2) from the 2x2 solve
    assert sorted(found) == [pytest.approx([2**-0.5, 1.0]), pytest.approx([1.0, 2**0.5])]


def test_c0_edge_rotations_are_integral():
    c = toric.ck_cone(0)
    faces = toric.check_good_cone(c)
    r = toric.is_reeb_vector(c, coefficients=[1] * 4, faces=faces)
    for e in faces.edges:
        rot = toric.edge_orbit_rotations(c, faces, r, e)
        assert all(x.is_integer() for x in rot.rotations)
        # the lift projects to the Reeb vector: sum c_i nu_i = R / b
        proj = [sum(float(x) * nu[k] for x, nu in zip(rot.rotations, c.normals)) for k in range(3)]
        assert proj == pytest.approx([float(v) / float(rot.b) for v in r.vector])


def test_orbit_index_rules():
    assert toric.orbit_rs_index([1, 1, 1], 1).mu_rs == 6
    eps = [Fraction(1, 100), Fraction(1, 300)]
    cs = [3 - eps[0], 2 - eps[1], 1]
    # sum 2 b_j - n with n = 2 perturbed coordinates
    assert toric.orbit_rs_index(cs).mu_rs == 2 * 6 - 2
    assert toric.rho(Fraction(5, 2)) == 5
    assert toric.rho(SurdRatio(LinearSurd.sqrt(2))) == 3


rotation_numbers = st.one_of(
    st.fractions(min_value=-3, max_value=3, max_denominator=6),
    st.builds(lambda m, q: SurdRatio(LinearSurd.sqrt(m), q), st.sampled_from([2, 3, 5, 7]), st.integers(1, 4)),
)


@given(st.lists(rotation_numbers, min_size=1, max_size=3), st.integers(1, 10))
def test_combinatorial_index_matches_engine(cs, N):
    assert toric.check_against_engine(cs, N)


def _unimodular(draw_ops, dim):
    g = [[int(i == j) for j in range(dim)] for i in range(dim)]
    for i, j, s in draw_ops:
        i, j = i % dim, j % dim
        if i != j:
            g[i] = [a + s * b for a, b in zip(g[i], g[j])]
    return g


@given(st.lists(st.tuples(st.integers(0, 2), st.integers(0, 2), st.sampled_from([-1, 1])), max_size=6),
       st.sampled_from(["sphere", "c1"]))
def test_lattice_invariance(ops, which):
    c = toric.sphere_cone(2) if which == "sphere" else toric.ck_cone(1)
    g = _unimodular(ops, 3)
    moved = toric.transform_cone(c, g)
    assert toric.fundamental_group(moved) == toric.fundamental_group(c)
    a = toric.hc_table(c, toric.nondegenerate_reeb_near(c), 8)
    b = toric.hc_table(moved, toric.nondegenerate_reeb_near(moved), 8)
    assert ranks(a, 8) == ranks(b, 8)


@given(st.permutations(range(4)))
def test_permutation_invariance(perm):
    c = toric.ck_cone(2)
    moved = cone([list(c.normals[i]) for i in perm])
    assert toric.fundamental_group(moved) == ()
    table = toric.hc_table(moved, toric.nondegenerate_reeb_near(moved), 6)
    assert ranks(table, 6) == [2, 0, 5, 0, 6, 0, 6]


def test_perturbed_reeb_has_positive_mean_indices():
    c = toric.ck_cone(3)
    faces = toric.check_good_cone(c)
    r = toric.nondegenerate_reeb_near(c, seed=5, faces=faces)
    for e in faces.edges:
        rot = toric.edge_orbit_rotations(c, faces, r, e)
        assert rot.nondegenerate and rot.mean_index() > 0


def test_hc_table_sphere_and_cutoff():
    c = toric.sphere_cone(1)
    t = toric.hc_table(c, toric.nondegenerate_reeb_near(c), 9)
    assert ranks(t, 9) == [0, 0, 0, 1, 0, 1, 0, 1, 0, 1]
    assert t.rank(10) is None and t.k_minus == 3 and t.k_plus is None


def test_k_minus():
    assert toric.k_minus(toric.ck_cone(0)) == 2
    assert toric.k_minus(toric.ck_cone(2)) == 0


def test_convexity_bound_rejects_bad_turns():
    c = toric.sphere_cone(1)
    with pytest.raises(NotInSubgroupK):
        toric.convexity_lower_bound(c, [Fraction(3, 2), 1])
    with pytest.raises(NotInSubgroupK):
        toric.convexity_lower_bound(c, [Fraction(1, 2), 1])


def test_convexity_bound_needs_integral_lift():
    with pytest.raises(UnsupportedCone):
        toric.convexity_lower_bound(cone([[2, 1], [0, 1]]), [Fraction(1, 2), Fraction(1, 2)])
