import math
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, strategies as st

from kms_lab.reals import (ContinuedFraction, bounded_partial_quotients, continued_fraction, convergents,
                           is_quadratic_irrational, parse_real, rationally_independent, symbolic)


def test_bounded_partial_quotients_examples():
    assert bounded_partial_quotients([1] * 50, 1)
    assert bounded_partial_quotients([1, 2] * 25, 2)
    assert not bounded_partial_quotients([1, 3, 10**6, 2], 100)
    assert bounded_partial_quotients(ContinuedFraction.parse("cf:1,2,..."), 2)


def test_continued_fraction_symbolic():
    golden = ContinuedFraction.parse("cf:1,...").symbolic()
    assert sympy.simplify(golden - (sympy.sqrt(5) - 1) / 2) == 0
    silver = ContinuedFraction.parse("cf:2,...").symbolic()
    assert sympy.simplify(silver - (sympy.sqrt(2) - 1)) == 0
    with pytest.raises(ValueError):
        ContinuedFraction.parse("cf:1,2")


@given(st.lists(st.integers(1, 9), max_size=3), st.lists(st.integers(1, 9), min_size=1, max_size=3))
def test_continued_fraction_round_trip(pre, period):
    cf = ContinuedFraction(tuple(pre), tuple(period))
    value = float(cf.symbolic())
    assert 0 < value < 1
    assert continued_fraction(value, 6, 64)[1:5] == cf.coefficients(4)
    assert ContinuedFraction.parse(str(cf)) == cf


def test_convergents_of_sqrt2():
    assert convergents(continued_fraction(math.sqrt(2), 6, 64))[:4] == [(1, 1), (3, 2), (7, 5), (17, 12)]


def test_parse_real_exact_and_surd():
    assert parse_real("3/7") == Fraction(3, 7)
    assert parse_real("0.25") == Fraction(1, 4)
    assert abs(float(parse_real("sqrt(2)")) - math.sqrt(2)) < 1e-16
    with pytest.raises(ValueError):
        symbolic("sqrt(")


def test_rational_independence():
    s2, s3 = sympy.sqrt(2), sympy.sqrt(3)
    assert rationally_independent(s2 - 1, s3) is True
    assert rationally_independent(s2 - 1, 2 * s2 + 5) is False
    assert rationally_independent(sympy.pi, s2) is True
    assert rationally_independent(None, s2) is None


def test_quadratic_irrational():
    assert is_quadratic_irrational(sympy.sqrt(2) - 1)
    assert not is_quadratic_irrational(sympy.Rational(1, 3))
    assert not is_quadratic_irrational(sympy.pi)
    assert not is_quadratic_irrational(sympy.cbrt(2))
