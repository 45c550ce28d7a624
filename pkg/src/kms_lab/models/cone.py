"""The cone family on T x R: X^delta is the image of the cone spanned by (0, 1) and (alpha, delta)."""
from __future__ import annotations

import numpy as np

from ..lattice import GroupElement, Potential, c_value
from ..reals import rationally_independent, symbolic, to_sympy
from .base import ModelSystem, SkewPoint
from .rotation import parse_angle, parse_param


class Cone(ModelSystem):
    """(x, y) + e1 = (x, y + 1), (x, y) + e2 = (x + alpha mod 1, y + theta).

    A class (x, y) with x in [0, 1) lies in X^delta iff its minimal nonnegative
    lift does, i.e. y >= (delta/alpha) x.  The measure is e^{-beta y} dx dy,
    normalized by its mass on X^delta.  Points are SkewPoint(x, y) with real y.
    """

    name = "cone"
    type_label = "?"
    basis = "e"

    def __init__(self, delta, alpha, pot: Potential):
        if not pot.beta > 0:
            raise ValueError("beta must be positive")
        self.pot = pot
        self.alpha, self.alpha_form, _ = parse_angle(alpha, pot)
        self.delta = parse_param(delta, pot)
        self.theta = pot.mp(pot.theta)
        if not 0 < self.delta <= self.theta:
            raise ValueError("need 0 < delta <= theta")
        self.slope = self.delta / self.alpha
        theta_form = symbolic(pot.theta_form) if pot.theta_form else None
        if pot.exact:
            theta_form = to_sympy(pot.theta)
        indep = rationally_independent(self.alpha_form, theta_form)
        if indep is False:
            raise ValueError("1, alpha and theta must be rationally independent")
        self.independence = "exact" if indep else "assumed"
        self.norm = self.x_mass()

    # geometry

    def act(self, pt: SkewPoint, s: GroupElement) -> SkewPoint:
        x = pt.base + s.b * self.alpha
        return SkewPoint(x - self.pot.ctx.floor(x), pt.level + s.a + s.b * self.theta)

    def in_x(self, pt: SkewPoint) -> bool:
        return pt.level >= self.slope * pt.base

    def cocycle(self, s: GroupElement, pt: SkewPoint):
        return c_value(s, self.pot)

    def column_threshold(self, pt: SkewPoint, col: int) -> int:
        """Largest n with pt - (col, n) in X; searched down from the bound y - col - n theta >= 0."""
        n = int(self.pot.ctx.floor((pt.level - col) / self.theta))
        while not self.in_x(self.act(pt, GroupElement(-col, -n))):
            n -= 1
        return n

    def sample_point(self, rng: np.random.Generator) -> SkewPoint:
        x = self.pot.mp(int(rng.integers(0, 1 << 62))) / (1 << 62)
        y = self.pot.mp(int(rng.integers(0, 1 << 62))) / (1 << 58) - 4
        return SkewPoint(x, y)

    def close(self, p1: SkewPoint, p2: SkewPoint, cell=None) -> bool:
        cell = 2.0**-10 if cell is None else float(cell)
        d = abs(p1.base - p2.base)
        return min(d, 1 - d) < cell and abs(p1.level - p2.level) < cell

    # closed-form integrals of e^{-beta y}

    def region(self, xa, xb, ylo, yhi, slope, offset):
        """int_{xa}^{xb} int_{max(ylo, slope x + offset)}^{yhi} e^{-beta y} dy dx (unnormalized)."""
        ctx, beta = self.pot.ctx, self.pot.mp(self.pot.beta)
        top = ctx.exp(-beta * yhi) if yhi != ctx.inf else ctx.mpf(0)
        if xb <= xa:
            return ctx.mpf(0)
        # line below ylo left of x1, above yhi right of x2 (slope > 0)
        x1 = min(max((ylo - offset) / slope, xa), xb)
        x2 = min(max((yhi - offset) / slope, xa), xb) if yhi != ctx.inf else xb
        flat = (x1 - xa) * (ctx.exp(-beta * ylo) - top) / beta
        sloped = ((ctx.exp(-beta * (slope * x1 + offset)) - ctx.exp(-beta * (slope * x2 + offset)))
                  / (beta**2 * slope) - (x2 - x1) * top / beta)
        return flat + sloped

    def x_mass(self):
        """mu(X^delta) = alpha (1 - e^{-beta delta/alpha}) / (beta^2 delta)."""
        ctx, beta = self.pot.ctx, self.pot.mp(self.pot.beta)
        return self.alpha * (1 - ctx.exp(-beta * self.delta / self.alpha)) / (beta**2 * self.delta)

    def x_mass_quadrature(self):
        """Independent route: numerical quadrature of the same double integral."""
        ctx, beta = self.pot.ctx, self.pot.mp(self.pot.beta)
        return ctx.quad(lambda x: ctx.exp(-beta * self.slope * x) / beta, [0, 1])

    def mass(self, x0, x1, y0, y1):
        """Normalized mass of ([x0, x1) x [y0, y1)) inside X^delta, 0 <= x0 < x1 <= 1."""
        return self.region(x0, x1, y0, y1, self.slope, 0) / self.norm

    def image_mass(self, x0, x1, y0, y1, s: GroupElement):
        """Mass of (box inside X^delta) + s, computed in the translated coordinates."""
        shift_x, shift_y = s.b * self.alpha, s.a + s.b * self.theta
        total = self.pot.ctx.mpf(0)
        wraps = int(self.pot.ctx.floor(x0 + shift_x))
        for j in (wraps, wraps + 1):
            # x' = x + shift_x - j for x in [x0, x1) with x' in [0, 1)
            lo = max(x0 + shift_x - j, 0)
            hi = min(x1 + shift_x - j, 1)
            if hi > lo:
                offset = shift_y - self.slope * (shift_x - j)
                total += self.region(lo, hi, y0 + shift_y, y1 + shift_y, self.slope, offset)
        return total / self.norm

    def check_conformality(self, trials: int = 50, seed: int = 0) -> float:
        rng = np.random.default_rng(seed)
        worst = self.pot.ctx.mpf(0)
        for _ in range(trials):
            x0, x1 = sorted(float(v) for v in rng.random(2))
            y0 = self.pot.mp(float(rng.uniform(-1, 4)))
            y1 = y0 + self.pot.mp(float(rng.uniform(0.1, 4)))
            base = self.mass(x0, x1, y0, y1)
            for s in (GroupElement(1, 0), GroupElement(0, 1),
                      GroupElement(int(rng.integers(0, 4)), int(rng.integers(0, 4)))):
                image = self.image_mass(x0, x1, y0, y1, s)
                worst = max(worst, abs(image - self.pot.boltzmann(c_value(s, self.pot)) * base))
        return float(worst)


def cone(delta, alpha, pot: Potential) -> Cone:
    return Cone(delta, alpha, pot)
