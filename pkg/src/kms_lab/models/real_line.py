"""Translations of the real line: t + e1 = t + 1, t + e2 = t + theta (type II by citation)."""
from __future__ import annotations

import numpy as np

from ..lattice import GroupElement, Potential, c_value
from ..measures import LineExponential
from ..reals import continued_fraction, convergents, is_exact
from .base import ModelSystem

# recurrence cell on the line; 2^-10 would leave log-RN values near 1e-3
LINE_CELL = 2.0**-24


class RealLine(ModelSystem):
    """Y = R, X = [0, inf), dm = beta e^{-beta t} dt; Q_t = {(m, n) : t >= m + n theta}."""

    name = "real-line"
    type_label = "II"
    basis = "e"

    def __init__(self, pot: Potential):
        if is_exact(pot.theta):
            raise ValueError("theta must be irrational, otherwise the action is not free")
        if not pot.theta > 0:
            raise ValueError("theta must be positive")
        if not pot.beta > 0:
            raise ValueError("beta must be positive")
        self.pot = pot
        self.theta = pot.mp(pot.theta)
        self.measure = LineExponential(pot)

    def act(self, t, s: GroupElement):
        return t + s.a + s.b * self.theta

    def in_x(self, t) -> bool:
        return t >= 0

    def cocycle(self, s: GroupElement, t):
        return c_value(s, self.pot)

    def column_threshold(self, t, col: int) -> int:
        return int(self.pot.ctx.floor((t - col) / self.theta))

    def sample_point(self, rng: np.random.Generator):
        return self.pot.mp(int(rng.integers(0, 1 << 62))) / (1 << 58) - 4

    def mass(self, a, b):
        """m([a, b)) on the whole line, by the closed-form antiderivative."""
        ctx, beta = self.pot.ctx, self.pot.mp(self.pot.beta)
        return ctx.exp(-beta * self.pot.mp(a)) - ctx.exp(-beta * self.pot.mp(b))

    def check_conformality(self, trials: int = 50, seed: int = 0) -> float:
        """max |m(E + s) - e^{-beta c(s)} m(E)| over random intervals E and small s."""
        rng = np.random.default_rng(seed)
        worst = self.pot.ctx.mpf(0)
        for _ in range(trials):
            a = self.sample_point(rng)
            b = a + self.pot.mp(float(rng.random()) * 4)
            for s in (GroupElement(1, 0), GroupElement(0, 1),
                      GroupElement(int(rng.integers(-3, 4)), int(rng.integers(-3, 4)))):
                image = self.mass(self.act(a, s), self.act(b, s))
                worst = max(worst, abs(image - self.pot.boltzmann(c_value(s, self.pot)) * self.mass(a, b)))
        return float(worst)

    def recurrences(self, t, cell=None, count: int = 4) -> list[GroupElement]:
        """s = (-p, q) for convergents p/q of theta with |q theta - p| < cell."""
        cell = LINE_CELL if cell is None else float(cell)
        out = []
        for p, q in convergents(continued_fraction(self.theta, 80, self.pot.precision)):
            if abs(q * self.theta - p) < cell:
                out += [GroupElement(-p, q), GroupElement(p, -q)]
            if len(out) >= 2 * count:
                break
        return out

    def close(self, t1, t2, cell=None) -> bool:
        return abs(t1 - t2) < (LINE_CELL if cell is None else float(cell))


def real_line(pot: Potential) -> RealLine:
    return RealLine(pot)
