import math
from fractions import Fraction

import numpy as np
import pytest
import sympy

from reeb_index import toric
from reeb_index.errors import HypothesesNotMet, MorseIndexOutOfRange, PinchingViolated, SchemaError
from reeb_index.estimates import (
    MultiplesUnknown,
    PinchingData,
    PrequantizationData,
    chern_pairing_check,
    homotopy_multiples,
    hr_linear_path,
    ind_hr,
    perturbed_orbit_index,
    pinched_index_bound,
    prequant_hc,
    projective_space_betti,
)
from reeb_index.index import cz_minus


def test_projective_space_betti():
    assert projective_space_betti(2) == (1, 0, 1, 0, 1)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_prequantization_of_projective_space_is_the_sphere(n):
    table = prequant_hc(PrequantizationData(n, projective_space_betti(n), 2 * n + 2), (0, n + 12))
    assert [table.rank(d) for d in range(n + 13)] == [int(d >= n + 2 and (d - n) % 2 == 0) for d in range(n + 13)]
    assert table.k_minus == n + 2 and table.k_plus is None


def test_single_multiple_shifts_betti_by_n():
    betti = (1, 0, 2, 0, 1)
    table = prequant_hc(PrequantizationData(2, betti, 3, multiples=(1,)), (-4, 8))
    # degree d carries H_{d+n}(N) shifted by mu_phi
    assert {d: r for d, r in table.ranks.items() if r} == {1: 1, 3: 2, 5: 1}
    assert (table.k_minus, table.k_plus) == (1, 5)


def test_prequantization_rejects_nonpositive_index():
    with pytest.raises(HypothesesNotMet):
        prequant_hc(PrequantizationData(1, (1, 0, 1), 0), (0, 6))


def test_prequantization_json_round_trip():
    data = PrequantizationData(2, (1, 0, 1, 0, 1), 6)
    assert PrequantizationData.from_json(data.to_json()) == data
    with pytest.raises(SchemaError):
        PrequantizationData.from_json({**data.to_json(), "genus": 0})


def test_perturbed_orbit_index():
    for n in (1, 2, 3):
        assert perturbed_orbit_index(0, 1, 2 * n + 2, n) == n + 2
    with pytest.raises(MorseIndexOutOfRange):
        perturbed_orbit_index(5, 1, 6, 2)


def test_homotopy_multiples():
    assert homotopy_multiples(1, True, 10) == (1,)
    assert homotopy_multiples(1, False, 4.5, simply_connected=True) == (1, 2, 3, 4)
    assert isinstance(homotopy_multiples(1, False, 10), MultiplesUnknown)


def test_chern_bounds():
    assert chern_pairing_check(1, 2, 1).bound == 2
    assert chern_pairing_check(3, 4, 2).bound == 4
    assert chern_pairing_check(3, 4, 2).omega_pairing == 1
    with pytest.raises(HypothesesNotMet):
        chern_pairing_check(1, 1, 1)
    with pytest.raises(HypothesesNotMet):
        chern_pairing_check(1, 2, 1, monotone=False)


def test_ind_hr_branches():
    assert ind_hr(1, 2 * sympy.pi, 1) == 2
    assert ind_hr(1, "3*pi", 1) == 6
    assert ind_hr(1, 2 * math.pi, 1.0) == 2
    assert ind_hr(2, Fraction(1), 1) == 3


@pytest.mark.parametrize("n, S, R", [(1, 2 * math.pi, 1.0), (1, 3 * math.pi, 1.0), (2, 7.5, 0.8), (0, 1.0, 1.0)])
def test_ind_hr_matches_engine(n, S, R):
    assert ind_hr(n, S, R) == cz_minus(hr_linear_path(n, S, R))


PINCHING_GRID = {
    (1, Fraction(3, 2)): 3, (1, 2): 7, (1, 3): 11,
    (2, Fraction(3, 2)): 4, (2, 2): 10, (2, 3): 16,
    (3, Fraction(3, 2)): 5, (3, 2): 13, (3, 3): 21,
}


@pytest.mark.parametrize("key", sorted(PINCHING_GRID))
def test_pinching_grid(key):
    n, k = key
    # strictly inside the admissible range R/r < sqrt(k/(k-1))
    kk = sympy.Rational(str(k))
    ratio = sympy.sqrt(kk / (kk - 1)) * sympy.Rational(99, 100)
    res = pinched_index_bound(PinchingData(n, 1, ratio, k))
    assert res.bound == PINCHING_GRID[key] == (2 * n + 2) * math.floor(k) - n


@pytest.mark.parametrize("n", [1, 2, 3])
def test_pinching_boundary(n):
    data = PinchingData(n, 1, "sqrt(2)", 2, allow_boundary=True)
    res = pinched_index_bound(data)
    assert res.bound == 3 * n + 4 and res.boundary
    with pytest.raises(PinchingViolated):
        pinched_index_bound(PinchingData(n, 1, "sqrt(2)", 2))
    with pytest.raises(PinchingViolated):
        pinched_index_bound(PinchingData(n, 1, "3/2", 2, allow_boundary=True))


def test_pinching_json():
    data = PinchingData.from_json({"n": 2, "r": 1, "R": "sqrt(2)", "k": 2, "allow_boundary": True})
    out = pinched_index_bound(data).to_json()
    assert out["bound"] == 10 and out["threshold"] == "sqrt(2)"
    with pytest.raises(SchemaError):
        PinchingData.from_json({"n": 2, "r": 1, "R": 1, "k": 2, "colour": 1})


def test_hr_path_is_a_scaled_rotation():
    p = hr_linear_path(1, 3 * math.pi, 1.0)
    assert np.allclose(p.generator(0.5), 3 * math.pi * np.eye(4))


def test_toric_and_prequant_tables_agree_for_cp1():
    c = toric.sphere_cone(1)
    t = toric.hc_table(c, toric.nondegenerate_reeb_near(c), 11)
    p = prequant_hc(PrequantizationData(1, (1, 0, 1), 4), (0, 11))
    assert all(t.rank(d) == p.rank(d) for d in range(12))
