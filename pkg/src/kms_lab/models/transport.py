"""Rational theta from theta = 1: re-index a model's action through an SL2(Z) matrix."""
from __future__ import annotations

from fractions import Fraction

import numpy as np

from ..errors import VariantMismatch
from ..lattice import GroupElement, Potential, TransportMatrix, c_value, sl2_transport, transported_c
from .base import ModelSystem


def largest_true(pred, start: int = 0) -> int:
    """Largest n with pred(n) for a predicate that is downward closed and eventually false."""
    lo = start
    step = 1
    if pred(lo):
        while pred(lo + step):
            lo, step = lo + step, step * 2
        hi = lo + step
    else:
        hi = lo
        while not pred(hi - step):
            hi, step = hi - step, step * 2
        lo = hi - step
    while hi - lo > 1:  # pred(lo) true, pred(hi) false
        mid = (lo + hi) // 2
        lo, hi = (mid, hi) if pred(mid) else (lo, mid)
    return lo


class TransportedModel(ModelSystem):
    """y (+) s = y + phi(s) on a theta = 1 model built at inverse temperature beta/q.

    The base measure is e^{-(beta/q) c}-conformal, hence e^{-beta c_theta}-conformal
    for the new action, since c(phi(s)) = q c_theta(s).
    """

    basis = "e"

    def __init__(self, base: ModelSystem, pot: Potential):
        theta = pot.theta
        if not isinstance(theta, Fraction) or theta <= 0:
            raise VariantMismatch("transport needs a positive rational theta")
        self.matrix: TransportMatrix = sl2_transport(theta.numerator, theta.denominator)
        if base.pot.theta != 1:
            raise VariantMismatch("the base model must have theta = 1")
        if abs(base.pot.mp(base.pot.beta) * self.matrix.q - pot.mp(pot.beta)) > pot.eps() * 64:
            raise ValueError("base model must be built at beta/q")
        self.base = base
        self.pot = pot
        self.name = f"transported-{base.name}"
        self.type_label = base.type_label

    def act(self, pt, s: GroupElement):
        return self.base.act(pt, self.matrix.apply(s))

    def in_x(self, pt) -> bool:
        return self.base.in_x(pt)

    def cocycle(self, s: GroupElement, pt):
        return self.base.cocycle(self.matrix.apply(s), pt)

    def column_threshold(self, pt, col: int) -> int:
        return largest_true(lambda n: self.in_x(self.act(pt, GroupElement(-col, -n))))

    def sample_point(self, rng: np.random.Generator):
        return self.base.sample_point(rng)

    def close(self, p1, p2, cell=None) -> bool:
        return self.base.close(p1, p2, cell)

    def check_rn_transport(self, samples: int = 200, seed: int = 0) -> dict:
        """c_theta(s) q = c(phi(s)) exactly, so both log-RN routes agree."""
        rng = np.random.default_rng(seed)
        bad = 0
        for _ in range(samples):
            s = GroupElement(int(rng.integers(-50, 51)), int(rng.integers(-50, 51)))
            bad += transported_c(self.matrix, s, self.pot) != self.matrix.q * c_value(s, self.pot)
        return {"samples": samples, "mismatches": int(bad)}


def transported_adding_machine(pot: Potential) -> TransportedModel:
    """Adding machine at beta/q carried to theta = p/q."""
    from .adding_machine import AddingMachine
    theta = pot.theta
    if not isinstance(theta, Fraction):
        raise VariantMismatch("transport needs a rational theta")
    base_pot = Potential(pot.mp(pot.beta) / theta.denominator, 1, pot.precision)
    return TransportedModel(AddingMachine(base_pot), pot)
