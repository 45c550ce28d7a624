import random
from fractions import Fraction

from hypothesis import given, settings, strategies as st

from kms_lab.lattice import E1, E2, V1, V2, ZERO, GroupElement, Potential, from_v_coords
from kms_lab.symbolic import (BiSeq, OmegaZPoint, act, birkhoff, chi, equivariance_check, in_hereditary_set,
                              is_periodic, profile, q_set, shift, stabilizer_of)

from oracles import (Bits, act_direct, birkhoff_direct, hereditary_direct, minimal_period_bruteforce,
                     profile_direct)
from strategies import biseq_texts, group_elements

ONES = BiSeq.constant(1)
ZEROS = BiSeq.constant(0)
STEP = BiSeq.parse("(0)* . (1)*")  # bit(k) = 1 iff k >= 0
ALT = BiSeq.periodic((0, 1))


def same_bits(x: BiSeq, oracle: Bits, window: int = 40) -> bool:
    return all(x.bit(k) == oracle(k) for k in range(-window, window))


@given(biseq_texts())
def test_parse_matches_naive_expansion(text):
    assert same_bits(BiSeq.parse(text), Bits.from_text(text))


@given(biseq_texts())
def test_canonical_form_is_unique(text):
    x = BiSeq.parse(text)
    assert BiSeq.parse(str(x)) == x


def test_shift_examples():
    assert shift(ONES, 5) == ONES
    moved = shift(STEP, 1)
    assert all(moved.bit(k) == (1 if k >= 1 else 0) for k in range(-20, 20))
    assert shift(BiSeq.parse("(01)* . (01)*"), 1) == BiSeq.parse("(10)* . (10)*")


@given(biseq_texts(), st.integers(-30, 30))
def test_shift_matches_definition(text, k):
    assert same_bits(shift(BiSeq.parse(text), k), Bits.from_text(text).shifted(k))


def test_chi_examples():
    assert chi(ZEROS, Potential(1, Fraction(7, 10))) == 1
    assert chi(ONES, Potential(1, Fraction(7, 10))) == Fraction(-7, 10)
    assert chi(STEP.__class__.parse("(1)* . (0)*"), Potential(1, 0)) == 0


def test_birkhoff_examples():
    pot = Potential(1, Fraction(3, 7))
    assert birkhoff(STEP, 0, pot) == 0
    assert birkhoff(ONES, 1, Potential(1, 0)) == 0
    assert birkhoff(STEP, -3, pot) == 3 * pot.theta


@given(biseq_texts(), st.integers(-60, 60), st.fractions(0, 3))
def test_birkhoff_matches_direct_sum(text, n, theta):
    pot = Potential(1, theta)
    assert birkhoff(BiSeq.parse(text), n, pot) == birkhoff_direct(Bits.from_text(text), n, theta)


def test_birkhoff_cocycle_law_exact():
    rng = random.Random(1)
    pot = Potential(1, Fraction(5, 3))
    for _ in range(100):
        x = BiSeq.parse(f"({rng.choice(['0', '1', '01', '011'])})* "
                        f"{''.join(rng.choice('01') for _ in range(4))} . "
                        f"{''.join(rng.choice('01') for _ in range(4))} ({rng.choice(['1', '0', '001'])})*")
        for m in range(-20, 21):
            for n in range(-20, 21, 5):
                assert birkhoff(x, m + n, pot) == birkhoff(x, n, pot) + birkhoff(shift(x, n), m, pot)


def test_birkhoff_large_n_is_closed_form():
    pot = Potential(1, Fraction(1, 2))
    x = BiSeq.parse("(0)* . (001)*")
    n = 3 * 10**9
    assert birkhoff(x, n, pot) == n  # x_{-1}, ..., x_{-n} all vanish
    assert birkhoff(x, -n, pot) == -n + Fraction(3, 2) * (n // 3)


def test_is_periodic_examples():
    assert is_periodic(ONES) == 1
    assert is_periodic(ALT) == 2
    assert is_periodic(STEP) is None


@given(biseq_texts())
def test_is_periodic_matches_bruteforce(text):
    x = BiSeq.parse(text)
    assert is_periodic(x) == minimal_period_bruteforce(Bits.from_text(text), 12)


def test_profile_examples():
    assert all(profile(OmegaZPoint(ZEROS, 5), m) == 5 for m in range(-10, 10))
    assert profile(OmegaZPoint(ONES, 0), 3) == -3 == profile_direct(Bits(lambda k: 1), 0, 3)


def test_profile_difference_is_bit():
    rng = random.Random(2)
    x = BiSeq.parse("(011)* 1 0 . 1 1 0 (0001)*")
    for _ in range(1000):
        pt = OmegaZPoint(x, rng.randint(-5, 5))
        m = rng.randint(-50, 50)
        assert profile(pt, m) - profile(pt, m + 1) == x.bit(m)
        assert profile(pt, 0) == pt.t


def test_hereditary_examples():
    assert in_hereditary_set(OmegaZPoint(ONES, 0), -E2)
    assert in_hereditary_set(OmegaZPoint(ZEROS, 0), ZERO)
    assert not in_hereditary_set(OmegaZPoint(ONES, 0), E1)


def test_hereditary_set_of_all_ones_is_a_half_plane():
    # follows the defining formula: first e-coordinate <= t
    for t in range(-2, 3):
        pt = OmegaZPoint(ONES, t)
        for a in range(-6, 7):
            for b in range(-6, 7):
                assert in_hereditary_set(pt, GroupElement(a, b)) == (a <= t)


@given(biseq_texts(), st.integers(-4, 4), group_elements(12))
def test_hereditary_matches_oracle_and_is_hereditary(text, t, s):
    pt = OmegaZPoint(BiSeq.parse(text), t)
    assert in_hereditary_set(pt, s) == hereditary_direct(Bits.from_text(text), t, s.a, s.b)
    if in_hereditary_set(pt, s):
        assert in_hereditary_set(pt, s - E1) and in_hereditary_set(pt, s - E2)


def test_act_examples():
    pt = OmegaZPoint(STEP, 0)
    assert act(pt, ZERO) == pt
    assert act(OmegaZPoint(ONES, 0), V1) == OmegaZPoint(ONES, 1)
    assert act(act(pt, V1), -V1) == pt


@given(biseq_texts(), st.integers(-4, 4), group_elements(15))
def test_act_matches_stepwise_oracle(text, t, s):
    y, level = act_direct(Bits.from_text(text), t, s.a, s.b)
    moved = act(OmegaZPoint(BiSeq.parse(text), t), s)
    assert moved.t == level
    assert same_bits(moved.x, y)


@settings(max_examples=300)
@given(biseq_texts(), st.integers(-4, 4), group_elements(), group_elements())
def test_act_is_group_action(text, t, s, u):
    pt = OmegaZPoint(BiSeq.parse(text), t)
    assert act(pt, s + u) == act(act(pt, s), u)


@given(biseq_texts(), st.integers(1, 30))
def test_level_change_along_v1_counts_ones(text, m):
    x = BiSeq.parse(text)
    pt = OmegaZPoint(x, 0)
    assert act(pt, m * V1).t == sum(x.bit(-k) for k in range(1, m + 1))


def test_equivariance_examples():
    assert equivariance_check(OmegaZPoint(STEP, 2), ZERO)
    assert equivariance_check(OmegaZPoint(ONES, 0), V2, 6)
    rng = random.Random(3)
    for _ in range(200):
        x = BiSeq.parse(f"({rng.choice(['0', '1', '01', '110'])})* {rng.choice(['', '1', '01'])} . "
                        f"{rng.choice(['', '0', '11'])} ({rng.choice(['1', '0', '10'])})*")
        s = GroupElement(rng.randint(-6, 6), rng.randint(-6, 6))
        assert equivariance_check(OmegaZPoint(x, rng.randint(-3, 3)), s, 8)


def test_stabilizer_examples():
    assert stabilizer_of(OmegaZPoint(ONES, 0)) == -E2
    assert stabilizer_of(OmegaZPoint(STEP, 0)) is None
    g = stabilizer_of(OmegaZPoint(ALT, 0))
    assert g == from_v_coords(2, -1)
    assert act(OmegaZPoint(ALT, 4), g) == OmegaZPoint(ALT, 4)


def test_stabilizer_generates_exactly():
    rng = random.Random(4)
    for word in [(1,), (0, 1), (0, 0, 1), (0, 1, 1), (0, 1, 0, 1, 1)]:
        pt = OmegaZPoint(BiSeq.periodic(word), rng.randint(-3, 3))
        g = stabilizer_of(pt)
        assert act(pt, g) == pt
        tried = 0
        while tried < 50:
            h = GroupElement(rng.randint(-20, 20), rng.randint(-20, 20))
            if any(k * g == h for k in range(-40, 41)):
                continue
            tried += 1
            assert act(pt, h) != pt


def test_q_set_examples():
    assert ZERO in q_set(OmegaZPoint(STEP, 0))
    assert V2 not in q_set(OmegaZPoint(ONES, 0))
    assert act(OmegaZPoint(ONES, 0), -V2).t == -1


@given(biseq_texts(), st.integers(-3, 3), group_elements(3))
def test_q_set_equivariance(text, t, s):
    pt = OmegaZPoint(BiSeq.parse(text), t)
    w = 8
    inner = 8 - 3
    here = q_set(pt, w)
    moved = q_set(act(pt, s), w)
    for a in range(-inner, inner + 1):
        for b in range(-inner, inner + 1):
            u = GroupElement(a, b)
            assert (u in here) == (u + s in moved)
