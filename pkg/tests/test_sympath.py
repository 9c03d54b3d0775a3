import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.linalg import expm

from reeb_index.errors import NonSymmetricGenerator, NotSymplectic, SchemaError
from reeb_index.sympath import (
    SymplecticMatrix,
    SymplecticPath,
    classify_spectrum,
    direct_sum,
    integrate_generator,
    inverse_path,
    iterate_path,
    nullity,
    product_path,
    rotation_path,
    shifted_path,
    standard_complex_structure,
    symplectic_defect,
)

from conftest import random_symmetric


def test_complex_structure_squares_to_minus_one():
    j0 = standard_complex_structure(3)
    assert np.array_equal(j0 @ j0, -np.eye(6))
    assert np.array_equal(j0[:3, 3:], -np.eye(3))


def test_hyperbolic_endpoint_matches_closed_form():
    # J0 diag(1,-1) = [[0,1],[1,0]], whose exponential is cosh/sinh
    p = SymplecticPath.constant(np.diag([1.0, -1.0]))
    ch, sh = math.cosh(1.0), math.sinh(1.0)
    assert np.allclose(p.endpoint(), [[ch, sh], [sh, ch]], atol=1e-9, rtol=0)


def test_cubic_samples_match_expm_for_constant_generator(rng):
    a = random_symmetric(rng, 4)
    p = SymplecticPath(2, (0.0, 0.3, 1.0), (a, a, a))
    assert np.allclose(p.endpoint(), expm(standard_complex_structure(2) @ a), atol=1e-9)


def test_square_iterate_endpoint(rng):
    p = SymplecticPath(2, (0.0, 0.5, 1.0), tuple(random_symmetric(rng, 4) for _ in range(3)))
    g = p.endpoint()
    assert np.allclose(iterate_path(p, 2).endpoint(), g @ g, atol=1e-9)


def test_iterate_is_continuous_at_joins(rng):
    p = SymplecticPath.piecewise_constant([0.0, 0.4, 1.0], [random_symmetric(rng, 2), random_symmetric(rng, 2)])
    it = iterate_path(p, 3)
    g = p.endpoint()
    assert np.allclose(it.matrix(1 / 3), g, atol=1e-10)
    assert np.allclose(it.matrix(2 / 3), g @ g, atol=1e-10)


def test_inverse_product_and_sum(rng):
    p = SymplecticPath.constant(random_symmetric(rng, 2))
    q = rotation_path([1.3])
    assert np.allclose(inverse_path(p).endpoint() @ p.endpoint(), np.eye(2), atol=1e-9)
    assert np.allclose(product_path(q, p).endpoint(), q.endpoint() @ p.endpoint(), atol=1e-9)
    s = direct_sum(p, q).endpoint()
    # canonical ordering (q1, q2, p1, p2)
    assert np.allclose(s[np.ix_([0, 2], [0, 2])], p.endpoint(), atol=1e-10)
    assert np.allclose(s[np.ix_([1, 3], [1, 3])], q.endpoint(), atol=1e-10)
    assert symplectic_defect(s) < 1e-10


def test_shifted_path_generator():
    p = shifted_path(rotation_path([2.0]), 0.25)
    assert np.allclose(p.generator(0.5), 1.75 * np.eye(2))


@given(st.integers(0, 10_000), st.integers(1, 3))
def test_endpoints_are_symplectic(seed, n):
    rng = np.random.default_rng(seed)
    p = SymplecticPath(n, (0.0, 0.5, 1.0), tuple(random_symmetric(rng, 2 * n, 2.0) for _ in range(3)))
    m = integrate_generator(p, 1.0)
    assert symplectic_defect(np.asarray(m)) < 1e-9 * max(1.0, np.abs(np.asarray(m)).max() ** 2)


def test_symplectic_matrix_validation():
    with pytest.raises(NotSymplectic):
        SymplecticMatrix(np.diag([2.0, 2.0]))
    with pytest.raises(NotSymplectic):
        SymplecticMatrix(np.eye(3))
    m = SymplecticMatrix(np.diag([2.0, 0.5]))
    assert np.allclose(np.asarray(m.inverse() @ m), np.eye(2))


def test_path_validation():
    with pytest.raises(NonSymmetricGenerator):
        SymplecticPath.constant(np.array([[0.0, 1.0], [0.0, 0.0]]))
    with pytest.raises(SchemaError):
        SymplecticPath(1, (0.0, 0.5), (np.eye(2), np.eye(2)))
    with pytest.raises(SchemaError):
        SymplecticPath(1, (0.0, 0.7, 0.5, 1.0), (np.eye(2),) * 4)


def test_json_round_trip_and_strict_keys(rng):
    p = SymplecticPath(1, (0.0, 0.5, 1.0), tuple(random_symmetric(rng, 2) for _ in range(3)))
    q = SymplecticPath.from_json(p.to_json())
    assert np.allclose(p.endpoint(), q.endpoint(), atol=1e-12)
    doc = p.to_json()
    doc["colour"] = "red"
    with pytest.raises(SchemaError):
        SymplecticPath.from_json(doc)
    with pytest.raises(SchemaError):
        SymplecticPath.from_json({"n": 1, "samples": [{"t": 0.0}]})


def test_spectrum_classification():
    rot = classify_spectrum(rotation_path([2 * math.pi / 5]).endpoint())
    assert rot.elliptic and rot.nullity == 0
    assert len(rot.unit_eigenvalues()) == 2
    hyp = classify_spectrum(np.diag([2.0, 0.5]))
    assert not hyp.elliptic
    ident = classify_spectrum(np.eye(4))
    assert ident.nullity == 4
    (c,) = ident.eigenvalues
    assert (c.algebraic, c.geometric) == (4, 4)


def test_jordan_block_multiplicities():
    shear = np.array([[1.0, 1.0], [0.0, 1.0]])
    (c,) = classify_spectrum(shear).eigenvalues
    assert (c.algebraic, c.geometric) == (2, 1)
    assert nullity(shear) == 1
