import math
from collections import Counter
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from kms_lab.errors import InsufficientRecurrences
from kms_lab.lattice import Potential
from kms_lab.models import (AddingMachine, RatioHistogram, RealLine, RotationII, nakada_potential,
                            ratio_set_sampler, transfer_density_estimate)
from kms_lab.models.transfer import PiecewisePotential, rn_deviation

ALPHA = math.sqrt(2) - 1


def test_nakada_split_points():
    assert nakada_potential(1.0).breaks == (0.5,)
    F = nakada_potential(2.0)
    assert F.breaks == (2 / 3,)
    assert list(F(np.array([0.1, 0.9]))) == [1.0, -2.0]
    with pytest.raises(ValueError):
        nakada_potential(0)


def test_beta_zero_gives_haar():
    est = transfer_density_estimate(nakada_potential(1.0), ALPHA, 0.0, 1 << 10)
    assert np.max(np.abs(est.density.density - 1)) < 1e-8


def test_estimate_satisfies_rn_identity_small_grid():
    F = nakada_potential(1.0)
    est = transfer_density_estimate(F, ALPHA, 0.8, 1 << 12)
    assert est.residual <= 1e-6
    rng = np.random.default_rng(0)
    worst = 0.0
    for _ in range(20):
        a = float(rng.random())
        b = a + float(rng.random()) * 0.5
        worst = max(worst, rn_deviation(est.density, F, ALPHA, 0.8, a, b))
    assert worst < 1e-3


def test_piecewise_potential_validation():
    with pytest.raises(ValueError):
        PiecewisePotential((0.5,), (1.0,))
    with pytest.raises(ValueError):
        PiecewisePotential((1.5,), (1.0, 2.0))


def test_grid_size_must_be_power_of_two():
    with pytest.raises(ValueError):
        transfer_density_estimate(nakada_potential(1.0), ALPHA, 0.8, 3000)


# ratio sampler

def test_ratio_samples_zero_raises():
    with pytest.raises(InsufficientRecurrences):
        ratio_set_sampler(RealLine(Potential.parse("1", "sqrt(2)")), 0, 0)


def test_ratio_adding_machine_values_in_beta_lattice():
    model = AddingMachine.from_p(Fraction(1, 4))
    hist = ratio_set_sampler(model, 64, 7, cell=6)
    beta = float(model.pot.beta)
    assert hist.lattice_residual(beta) < 1e-6
    assert len(hist.counts) >= 3


def test_ratio_real_line_near_zero():
    hist = ratio_set_sampler(RealLine(Potential.parse("1", "sqrt(2)")), 32, 7)
    assert hist.max_abs() < 1e-6


def test_ratio_rotation2_trivial():
    hist = ratio_set_sampler(RotationII("sqrt(2)-1", "0.2", Potential(Fraction(4, 5), 1)), 32, 7, cell=1e-3)
    assert hist.max_abs() == 0


def test_ratio_independent_of_workers():
    model = AddingMachine.from_p(Fraction(1, 4))
    one = ratio_set_sampler(model, 40, 11, cell=5, workers=1)
    four = ratio_set_sampler(model, 40, 11, cell=5, workers=4)
    assert one == four
    assert one.to_csv().splitlines()[0] == "log_rn_value,count"


@given(st.lists(st.floats(-5, 5), max_size=20), st.lists(st.floats(-5, 5), max_size=20))
def test_histogram_merge_is_order_free(xs, ys):
    a, b = RatioHistogram(samples=1), RatioHistogram(samples=2)
    for v in xs:
        a.add(v)
    for v in ys:
        b.add(v)
    assert a.merge(b) == b.merge(a)
    assert a.merge(b).total == len(xs) + len(ys)
    assert isinstance(a.counts, Counter)
