import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from kms_lab.lattice import (E1, E2, V2, ZERO, GroupElement, Potential, c_value, existence_gate,
                             from_v_coords, sl2_transport, to_v_coords, transported_c)
from kms_lab.errors import TracialRegime

from oracles import sl2_bruteforce
from strategies import group_elements


def test_c_value_examples():
    pot = Potential(1, Fraction(1, 2))
    assert c_value(E1, pot) == 1
    assert c_value(ZERO, pot) == 0
    assert c_value(V2, pot) == Fraction(3, 2)


@given(group_elements(), group_elements(), st.fractions(-5, 5))
def test_c_is_additive_exactly(s, t, theta):
    pot = Potential(1, theta)
    assert c_value(s + t, pot) == c_value(s, pot) + c_value(t, pot)


def test_v_coords_examples():
    assert to_v_coords(E1) == (1, 0)
    assert to_v_coords(E2) == (-1, 1)
    assert to_v_coords(GroupElement(3, 2)) == (1, 2)


def test_v_coords_round_trip_10k():
    rng = random.Random(0)
    for _ in range(10_000):
        s = GroupElement(rng.randint(-10**6, 10**6), rng.randint(-10**6, 10**6))
        assert from_v_coords(*to_v_coords(s)) == s
        m, n = to_v_coords(s)
        # m v1 + n v2 with v1 = (1, 0), v2 = (1, 1)
        assert (m + n, n) == (s.a, s.b)


def test_sl2_examples():
    assert sl2_transport(3, 1).rows == ((1, 2), (0, 1))
    assert sl2_transport(1, 1).rows == ((1, 0), (0, 1))
    M = sl2_transport(3, 2)
    assert M.rows == ((1, 1), (1, 2))
    assert transported_c(M, E1) == 2
    assert transported_c(M, E2) == 3
    assert transported_c(M, ZERO) == 0


@pytest.mark.parametrize("p,q", [(2, 4), (0, 3), (3, -1), (6, 9)])
def test_sl2_rejects(p, q):
    with pytest.raises(ValueError):
        sl2_transport(p, q)


def test_sl2_matches_bruteforce_recipe():
    for p in range(1, 51):
        for q in range(1, 51):
            if math.gcd(p, q) != 1:
                continue
            M = sl2_transport(p, q)
            assert (M.x, M.y, M.z, M.w) == sl2_bruteforce(p, q)


def test_existence_gate():
    assert existence_gate(Potential(1, 0.5))
    assert not existence_gate(Potential(-1, 0.5))
    assert not existence_gate(Potential(1, -0.2))
    with pytest.raises(TracialRegime):
        existence_gate(Potential(0, 1))


def test_potential_parse_keeps_rationals_exact():
    pot = Potential.parse("1", "3/2")
    assert pot.exact and pot.theta == Fraction(3, 2)
    irr = Potential.parse("1", "sqrt(2)")
    assert not irr.exact
    assert abs(float(irr.theta) - math.sqrt(2)) < 1e-15
