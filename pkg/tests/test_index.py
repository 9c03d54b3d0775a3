import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from reeb_index import index
from reeb_index.errors import DegenerateEndpoint
from reeb_index.index import (
    IndexReport,
    TrivializationShift,
    apply_trivialization_shift,
    cz_index,
    cz_minus,
    cz_plus,
    index_report,
    maslov_index,
    mean_index,
    reduced_index,
    rs_index,
    spectral_flow_index,
)
from reeb_index.sympath import SymplecticPath, direct_sum, inverse_path, product_path, rotation_path

from conftest import random_symmetric

TWO_PI = 2 * math.pi


def rotation(c: float) -> SymplecticPath:
    return rotation_path([TWO_PI * c])


def small_generator(rng, n):
    a = random_symmetric(rng, 2 * n)
    a *= rng.uniform(0.2, 0.95) * TWO_PI / np.linalg.norm(a, 2)
    return a


def test_signature_of_small_negative_definite():
    assert cz_index(SymplecticPath.constant(-1e-3 * np.eye(4))) == -2


@given(st.integers(0, 10_000), st.integers(1, 3))
def test_signature_axiom(seed, n):
    rng = np.random.default_rng(seed)
    a = small_generator(rng, n)
    ev = np.linalg.eigvalsh(a)
    if np.min(np.abs(ev)) < 1e-3:
        return
    assert cz_index(SymplecticPath.constant(a)) == int(np.sum(np.sign(ev))) // 2


@pytest.mark.parametrize("c", [0.1, 0.37, 0.5, 0.93])
def test_short_rotation_has_index_one(c):
    assert cz_index(rotation(c)) == 1


@pytest.mark.parametrize("c", [0.3, 1.7, -0.4])
def test_loop_axiom(c):
    loop = rotation(1.0)
    assert maslov_index(loop) == 1
    base = rotation(c)
    assert cz_index(product_path(loop, base)) == cz_index(base) + 2


def test_degenerate_endpoint_rejected():
    with pytest.raises(DegenerateEndpoint):
        cz_index(rotation(1.0))


def test_robbin_salamon_of_rotations():
    assert rs_index(rotation(1.0)) == 2
    assert rs_index(rotation(2.5)) == 5
    assert rs_index(rotation(0.0)) == 0
    assert rs_index(rotation_path([TWO_PI, 0.0])) == 2


def test_extensions_at_full_turn():
    p = rotation(1.0)
    assert cz_minus(p) == 1
    assert cz_plus(p) == 3
    assert cz_plus(p, literal=True) == 3


def test_extensions_of_identity_path():
    p = SymplecticPath.constant(np.zeros((4, 4)))
    assert (cz_minus(p), cz_plus(p)) == (-2, 2)


def test_shift_and_product_perturbations_agree(rng):
    gens = [random_symmetric(rng, 4, 3.0), TWO_PI * np.eye(4)]
    p = SymplecticPath.piecewise_constant([0.0, 0.5, 1.0], gens)
    assert cz_minus(p, method="shift") == cz_minus(p, method="product")


@pytest.mark.parametrize("c", [0.3, -0.7, 1.0, 1.25])
def test_mean_index_of_rotation(c):
    assert abs(mean_index(rotation(c)) - 2 * c) <= 1 / 8 + 1e-12


def test_mean_index_of_hyperbolic_path():
    assert abs(mean_index(SymplecticPath.constant(np.diag([1.0, -1.0])))) <= 1 / 8


def test_index_report_and_shift():
    rep = index_report(rotation(1.0))
    assert rep == IndexReport(Fraction(2), 1, 3, 2.0, 2)
    assert rep.to_json() == {"mu_rs": "4/2", "mu_minus": 1, "mu_plus": 3, "mean": 2.0, "nullity": 2}
    moved = apply_trivialization_shift(rep, TrivializationShift(-1))
    assert (moved.mu_rs, moved.mu_minus, moved.mu_plus, moved.mean, moved.nullity) == (0, -1, 1, 0.0, 2)


def test_reduced_index():
    rep = index_report(rotation(0.4), k_max=4)
    assert rep.nondegenerate
    assert reduced_index(rep.mu_minus, 1) == rep.mu_minus - 1


def test_spectral_flow_of_zero_generator():
    assert spectral_flow_index(SymplecticPath.constant(np.zeros((2, 2)))) == -1
    assert spectral_flow_index(SymplecticPath.constant(np.zeros((4, 4)))) == -2


@pytest.mark.parametrize("seed", range(4))
def test_spectral_flow_matches_conley_zehnder(seed):
    rng = np.random.default_rng(seed)
    p = SymplecticPath(1, (0.0, 0.5, 1.0), tuple(random_symmetric(rng, 2, 4.0) for _ in range(3)))
    assert spectral_flow_index(p) == cz_index(p)


@given(st.integers(0, 10_000))
def test_inverse_and_direct_sum(seed):
    rng = np.random.default_rng(seed)
    p = SymplecticPath.constant(random_symmetric(rng, 2, 8.0))
    q = SymplecticPath.constant(random_symmetric(rng, 4, 8.0))
    if index.path_nullity(p) or index.path_nullity(q):
        return
    assert cz_index(inverse_path(p)) == -cz_index(p)
    assert cz_index(direct_sum(p, q)) == cz_index(p) + cz_index(q)


def test_index_bounds_against_mean_index():
    p = rotation_path([TWO_PI * 0.5, TWO_PI * 1.3])
    rep = index_report(p)
    assert abs(rep.mu_minus - rep.mean) <= 2 and abs(rep.mu_plus - rep.mean) <= 2
