import math
from fractions import Fraction

import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from reeb_index.surd import LinearSurd, SurdRatio, proportional, rank_over_q

small = st.fractions(min_value=-20, max_value=20, max_denominator=50)


def surd(q0, q2, q3):
    return LinearSurd({1: q0, 2: q2, 3: q3})


def test_square_free_reduction():
    assert LinearSurd.sqrt(12) == LinearSurd.sqrt(3, 2)
    assert LinearSurd.sqrt(16).is_rational() and LinearSurd.sqrt(16).rational() == 4


def test_parse_and_str_round_trip():
    x = LinearSurd.parse("1 + sqrt(599)/100")
    assert LinearSurd.parse(str(x)) == x
    assert float(x) == pytest.approx(1 + math.sqrt(599) / 100)
    with pytest.raises(ValueError):
        LinearSurd.from_sympy(sympy.pi)


def test_products_stay_linear_or_fail():
    x = LinearSurd.sqrt(2)
    assert x * Fraction(1, 2) == LinearSurd.sqrt(2, Fraction(1, 2))
    with pytest.raises(TypeError):
        x * 0.5
    with pytest.raises(TypeError):
        LinearSurd.coerce(1.5)


@given(small, small, small)
def test_sign_matches_high_precision(q0, q2, q3):
    x = surd(q0, q2, q3)
    exact = sympy.Rational(q0.numerator, q0.denominator) + sympy.Rational(q2.numerator, q2.denominator) * sympy.sqrt(2) \
        + sympy.Rational(q3.numerator, q3.denominator) * sympy.sqrt(3)
    assert x.sign() == int(sympy.sign(exact))


def test_sign_of_near_cancellation():
    # 1.4142135623730951 is the float nearest sqrt(2); the difference is ~1e-17
    x = LinearSurd.sqrt(2) - Fraction(14142135623730951, 10**16)
    assert x.sign() == -1


def test_rational_rank():
    one, r2, r3 = LinearSurd.coerce(1), LinearSurd.sqrt(2), LinearSurd.sqrt(3)
    assert rank_over_q([one, r2, r3]) == 3
    assert rank_over_q([r2, r2 * 3, one]) == 2
    assert proportional(r2 * 5, r2) and not proportional(r2, r3)


def test_surd_ratio_floor_and_compare():
    r = SurdRatio(LinearSurd.sqrt(3) * 5)
    assert r.floor() == 8 and not r.is_integer()
    assert SurdRatio(LinearSurd.sqrt(8), LinearSurd.sqrt(2)).is_integer()
    assert SurdRatio(3, 2).compare(Fraction(3, 2)) == 0
    assert (SurdRatio(1, -2) * 4).floor() == -2
    with pytest.raises(ZeroDivisionError):
        SurdRatio(1, 0)
