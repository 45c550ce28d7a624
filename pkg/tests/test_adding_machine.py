import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from kms_lab.errors import VariantMismatch
from kms_lab.lattice import E1, E2, ZERO, GroupElement, Potential
from kms_lab.models import AddingMachine, DyadicPoint, SkewPoint, injectivity_test, q_embed
from kms_lab.models.adding_machine import odometer, phi, separation_witness
from kms_lab.models.base import check_cocycle, check_equivariance

from oracles import dyadic_mass, odometer_direct

P = Fraction(1, 4)
MODEL = AddingMachine.from_p(P)

prefixes = st.lists(st.integers(0, 1), max_size=12).map(tuple)
tails = st.lists(st.integers(0, 1), min_size=2, max_size=4).map(tuple).filter(lambda t: set(t) == {0, 1})


def test_phi_examples():
    assert phi(DyadicPoint((0,), (0, 1))) == -1
    assert phi(DyadicPoint((1, 0), (0, 1))) == 0
    assert phi(DyadicPoint((1, 1, 1, 0), (0, 1))) == 2
    x = SkewPoint(DyadicPoint((1, 0), (0, 1)), 0)
    assert MODEL.cocycle(E1, x) == 0
    assert MODEL.cocycle(ZERO, x) == 0


@given(prefixes, tails, st.integers(-200, 200))
def test_odometer_matches_carry_oracle(prefix, tail, m):
    x = DyadicPoint(prefix, tail)
    width = len(prefix) + 12 * len(tail)
    bits = list(x.word(width))
    y, c = odometer(x, m)
    ref_bits, ref_c = odometer_direct(bits, m)
    assert c == ref_c
    assert list(y.word(width - len(tail))) == ref_bits[:width - len(tail)]


def test_rn_example_by_hand():
    # C = {x_1 = 0}: tau C = {x_1 = 1} of mass p; phi = -1 on C
    lhs, rhs = MODEL.rn_sides((0,))
    assert lhs == P
    assert rhs == MODEL.r * (1 - P) == P


def test_rn_exact_against_cylinder_oracle():
    ratio = (1 - P) / P
    for d in range(1, 11):
        for word in itertools.product((0, 1), repeat=d):
            lhs, rhs = MODEL.rn_sides(word)
            if 0 in word:
                moved, _ = odometer_direct(list(word), 1)
                j = word.index(0) + 1
                assert lhs == dyadic_mass(moved, P)
                assert rhs == ratio ** (j - 2) * dyadic_mass(word, P)
            else:
                # split [1^d] by the first zero j in d+1..D; both remainders are (1-p)^D
                D = d + 200
                lhs_ref = sum(dyadic_mass((0,) * (j - 1) + (1,), P) for j in range(d + 1, D + 1))
                rhs_ref = sum(ratio ** (j - 2) * dyadic_mass((1,) * (j - 1) + (0,), P) for j in range(d + 1, D + 1))
                assert 0 < lhs - lhs_ref <= (1 - P) ** D
                assert 0 < rhs - rhs_ref <= (1 - P) ** D


def test_rn_and_conformality_exact_depth_8():
    assert MODEL.check_rn(8)["max_deviation"] == 0
    assert MODEL.check_conformality(8)["max_deviation"] == 0


def test_separation_example():
    x, y = DyadicPoint((0,), (0, 1)), DyadicPoint((1, 0), (0, 1))
    assert separation_witness(x, y) == 0
    assert phi(x) == -1 and phi(y) == 0


@given(prefixes, prefixes, tails)
def test_separation_witness_separates(p1, p2, tail):
    x, y = DyadicPoint(p1, tail), DyadicPoint(p2, tail)
    if x == y:
        return
    m = separation_witness(x, y)
    assert m >= 0
    assert phi(odometer(x, m)[0]) != phi(odometer(y, m)[0])


def test_q_set_of_point_and_structure():
    pt = SkewPoint(DyadicPoint((0, 1), (0, 1)), 0)
    assert ZERO in q_embed(MODEL, pt, 4)
    assert MODEL.check_structure(300, 0) == {"x_plus_n2_in_x": True, "pure": True, "translates_cover": True}
    assert check_cocycle(MODEL, 300, 1) == 0
    assert check_equivariance(MODEL, 50, 5, 2) == 0


def test_injectivity_sampled():
    rep = injectivity_test(MODEL, 60, 8, 3)
    assert rep.passed and rep.witness_checks == rep.pairs


def test_rejects_wrong_theta_and_p():
    with pytest.raises(VariantMismatch):
        AddingMachine(Potential(1, 2))
    with pytest.raises(ValueError):
        AddingMachine(Potential(1, 1), Fraction(1, 4))


def test_approximate_p_when_not_given():
    m = AddingMachine(Potential(1, 1))
    assert not m.exact
    assert abs(float(m.p) - 1 / (1 + np.e)) < 1e-12
