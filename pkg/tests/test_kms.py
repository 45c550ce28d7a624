import cmath
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from kms_lab.errors import VariantMismatch
from kms_lab.lattice import E1, E2, V1, ZERO, GroupElement, Potential, from_v_coords
from kms_lab.measures import lift, orbit_measure
from kms_lab.kms import (COEFFICIENTS, FULL, AlgebraElement, CondExp, CylinderFunction, ThetaZero, TorusMeasure,
                         Tracial, TypeI, adjoint, as_function, contains, convolve, evaluate_state, involution,
                         level_integral, level_integral_bruteforce, parse_element, pointwise_gap, r_shift,
                         random_element, random_function, random_unit_point, sigma_ibeta, verify_kms)
from kms_lab.symbolic import BiSeq

from strategies import group_elements

POT = Potential(Fraction(13, 10), Fraction(7, 10))
MBAR = lift(orbit_measure(BiSeq.parse("(0)* . (1)*"), POT), POT)
RNG_POINTS = [random_unit_point(np.random.default_rng(i)) for i in range(100)]


def rng(seed):
    return np.random.default_rng(seed)


constraint_lists = st.lists(st.tuples(group_elements(3), st.integers(0, 1)), max_size=4)


@settings(max_examples=200)
@given(st.lists(st.tuples(constraint_lists, st.sampled_from(COEFFICIENTS)), max_size=3), st.integers(0, 10**6))
def test_cylinder_normal_form_preserves_values(raw, seed):
    f = CylinderFunction.build(raw)
    r = np.random.default_rng(seed)
    for _ in range(10):
        A = random_unit_point(r)
        direct = sum((c for cons, c in raw
                      if all(contains(A, u) == bool(b) for u, b in cons)), 0)
        assert abs(complex(f(A)) - complex(direct)) < 1e-12


def test_r_shift_examples():
    f = random_function(rng(0))
    assert r_shift(f, ZERO) == f
    s = GroupElement(2, -1)
    assert r_shift(CylinderFunction.constant(), s) == CylinderFunction.eps(s)


def test_r_shift_inverse_on_range():
    r = rng(1)
    for _ in range(100):
        f = random_function(r)
        s = GroupElement(int(r.integers(-3, 4)), int(r.integers(-3, 4)))
        lhs = r_shift(r_shift(f, -s), s) * CylinderFunction.eps(s)
        rhs = f * CylinderFunction.eps(s)
        for A in RNG_POINTS:
            assert abs(complex(lhs(A)) - complex(rhs(A))) < 1e-12


def test_product_examples():
    for s in (E1, GroupElement(2, 3), GroupElement(-1, 2)):
        ws, wms = AlgebraElement.w(s), AlgebraElement.w(-s)
        assert ws * wms == AlgebraElement.w(ZERO, CylinderFunction.eps(s))
    for s in (E1, E2, GroupElement(2, 3)):
        assert AlgebraElement.w(-s) * AlgebraElement.w(s) == AlgebraElement.identity()


def test_oracle_product_associativity_adjoint():
    r = rng(2)
    for _ in range(100):
        a, b, c = (random_element(r) for _ in range(3))
        assert pointwise_gap(as_function(a * b), convolve(as_function(a), as_function(b)), RNG_POINTS[:25]) < 1e-12
        assert (a * b) * c == a * (b * c)
        assert pointwise_gap(as_function(adjoint(a)), involution(as_function(a)), RNG_POINTS[:25]) < 1e-12
        assert adjoint(adjoint(a)) == a
        assert adjoint(a * b) == adjoint(b) * adjoint(a)


def test_adjoint_of_projection():
    p = AlgebraElement.w(ZERO, CylinderFunction.eps(GroupElement(1, 2)))
    assert adjoint(p) == p


def test_sigma_examples():
    a = AlgebraElement.w(E1)
    assert abs(complex(sigma_ibeta(a, POT).component(E1)(FULL)) - math.exp(-1.3)) < 1e-15
    f = random_function(rng(3))
    assert sigma_ibeta(AlgebraElement.w(ZERO, f), POT) == AlgebraElement.w(ZERO, f)
    s = GroupElement(1, 2)
    flipped = adjoint(sigma_ibeta(AlgebraElement.w(s), POT))
    expected = math.exp(-1.3 * (1 + 2 * 0.7))
    assert abs(complex(flipped.component(-s)(FULL)) - expected) < 1e-12


def test_condexp_examples():
    st_ = CondExp(MBAR)
    value = evaluate_state(st_, AlgebraElement.w(ZERO, CylinderFunction.eps(E1)), POT)
    assert abs(value - math.exp(-1.3)) < 1e-12
    a = AlgebraElement.w(E1)
    lhs = evaluate_state(st_, a * adjoint(a), POT)
    rhs = evaluate_state(st_, adjoint(a) * sigma_ibeta(a, POT), POT)
    assert abs(lhs - math.exp(-1.3)) < 1e-12 and abs(rhs - math.exp(-1.3)) < 1e-12


def test_level_integral_matches_bruteforce():
    r = rng(4)
    for _ in range(20):
        f = random_function(r)
        # levels past 60 carry mass below q^60 = e^{-132}
        assert abs(complex(level_integral(f, MBAR)) - complex(level_integral_bruteforce(f, MBAR, 60))) < 1e-12


def test_theta_zero_examples():
    pot = Potential(1, 0)
    haar = ThetaZero(TorusMeasure((), 1.0))
    assert evaluate_state(haar, AlgebraElement.w(GroupElement(0, 3)), pot) == 0
    point = ThetaZero(TorusMeasure((((0.0,), 1.0),), 0.0))
    value = evaluate_state(point, AlgebraElement.w(ZERO, CylinderFunction.eps(V1)), pot)
    assert abs(value - math.exp(-1)) < 1e-15
    with pytest.raises(VariantMismatch):
        verify_kms(point, POT, 1)


def test_tracial_examples():
    st_ = Tracial(TorusMeasure((), 1.0))
    assert evaluate_state(st_, AlgebraElement.identity(), POT) == 1
    assert evaluate_state(st_, AlgebraElement.w(GroupElement(1, -2)), POT) == 0
    # f carrying u -> 0 for u outside -N^2 vanishes at the full set
    f = CylinderFunction.build([(((GroupElement(1, -1), 0),), 1)])
    assert evaluate_state(Tracial(TorusMeasure((((0.25, 0.5), 1.0),), 0.0)), AlgebraElement.w(E1, f), POT) == 0
    # a constraint -e1 -> 0 is never met by a set containing 0, so the function is zero outright
    assert not CylinderFunction.build([(((-E1, 0),), 1)])


def test_type_i_character_convention():
    pot = Potential(1, 1)
    mbar = lift(orbit_measure(BiSeq.periodic((0, 1)), pot), pot)
    chi = cmath.exp(2j * math.pi * 0.25)  # i
    st_ = TypeI(mbar, chi)
    g = st_.generator()
    assert g == from_v_coords(2, -1) == GroupElement(1, -1)
    # the value on w_g is the conjugate character times the total mass
    value = evaluate_state(st_, AlgebraElement.w(g), pot)
    assert abs(value - (-1j)) < 1e-12
    assert abs(evaluate_state(st_, AlgebraElement.w(2 * g), pot) - (-1)) < 1e-12
    assert evaluate_state(st_, AlgebraElement.w(E1), pot) == 0


def test_type_i_needs_c_zero_stabilizer():
    pot = Potential(1, Fraction(1, 2))
    with pytest.raises(Exception):
        TypeI(lift(orbit_measure(BiSeq.periodic((0, 1)), pot), pot), 1).validate(pot)


@pytest.mark.parametrize("state,pot", [
    (CondExp(MBAR), POT),
    (TypeI(lift(orbit_measure(BiSeq.periodic((0, 1)), Potential(1, 1)), Potential(1, 1)), 1j), Potential(1, 1)),
    (ThetaZero(TorusMeasure((((0.3,), 0.5),), 0.5)), Potential(2, 0)),
    (Tracial(TorusMeasure((((0.1, 0.7), 0.25),), 0.75)), POT),
])
def test_kms_families_small(state, pot):
    rep = verify_kms(state, pot, 40, 5)
    assert rep.passed, rep.to_json()


def test_kms_checker_discriminates():
    wrong = Potential(Fraction(14, 10), Fraction(7, 10))
    rep = verify_kms(CondExp(MBAR), wrong, 100, 6)
    assert rep.max_deviation > 1e-3


def test_identity_as_first_argument():
    r = rng(7)
    st_ = CondExp(MBAR)
    for _ in range(20):
        b = random_element(r)
        one = AlgebraElement.identity()
        assert abs(evaluate_state(st_, one * b, POT) - evaluate_state(st_, b * sigma_ibeta(one, POT), POT)) < 1e-15


def test_text_syntax_example():
    a = parse_element("0.5 * [(1,0):1, (0,-1):0] w(1,0) - (0.5+1j) * [] w(0,0) + w(2,-1)")
    assert parse_element(str(a)) == a
    assert a.component(GroupElement(2, -1)) == CylinderFunction.eps(GroupElement(2, -1))
    with pytest.raises(ValueError):
        parse_element("w(1,0) w(0,1)")


@given(st.integers(0, 10**9))
def test_text_syntax_round_trip(seed):
    a = random_element(np.random.default_rng(seed))
    assert parse_element(str(a)) == a
