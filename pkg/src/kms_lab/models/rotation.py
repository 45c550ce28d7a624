"""Circle-rotation skew products: type II via h_eta (theta = 1), type III via F_gamma."""
from __future__ import annotations

from fractions import Fraction

import numpy as np

from ..errors import VariantMismatch
from ..lattice import GroupElement, Potential, from_v_coords, to_v_coords
from ..measures import CircleDensity
from ..reals import (ContinuedFraction, bounded_partial_quotients, continued_fraction,
                     convergents, in_q_plus_q_alpha, is_quadratic_irrational, parse_real,
                     symbolic)
from .base import ModelSystem, SkewPoint
from .transfer import nakada_potential, rn_deviation, transfer_density_estimate


def parse_angle(alpha, pot: Potential):
    """(value mod 1 at working precision, symbolic form or None, continued fraction or None).

    Strings are parsed exactly (surds, ``cf:...``); numeric inputs are taken
    as given and their irrationality is assumed.
    """
    form = cf = None
    if isinstance(alpha, str):
        text = alpha.strip()
        if text.startswith("cf:"):
            cf = ContinuedFraction.parse(text)
        form = symbolic(text)
        if form.is_rational:
            raise ValueError("rotation angle must be irrational")
        value = pot.ctx.mpf(str(form.evalf(int(pot.precision * 0.302) + 10)))
    elif isinstance(alpha, (int, Fraction)):
        raise ValueError("rotation angle must be irrational")
    else:
        value = pot.ctx.mpf(alpha)
    value = value - pot.ctx.floor(value)
    if not 0 < value < 1:
        raise ValueError("rotation angle must lie in (0, 1)")
    return value, form, cf


def parse_param(value, pot: Potential):
    return pot.mp(parse_real(value, pot.precision) if isinstance(value, str) else value)


class CircleModel(ModelSystem):
    """Shared circle bookkeeping: points (x, t) with x in [0, 1) at working precision."""

    def rotate(self, x, k: int):
        y = x + k * self.alpha
        return y - self.pot.ctx.floor(y)

    def sample_point(self, rng: np.random.Generator) -> SkewPoint:
        x = self.pot.mp(int(rng.integers(0, 1 << 62))) / (1 << 62)
        return SkewPoint(x, int(rng.integers(-4, 12)))

    def circle_distance(self, x, y):
        d = abs(x - y)
        return min(d, 1 - d)

    def return_times(self, cell) -> list[int]:
        """Convergent denominators q with ||q alpha|| < cell."""
        cell = 2.0**-10 if cell is None else float(cell)
        coeffs = continued_fraction(self.alpha, 60, self.pot.precision)
        out = []
        for _, q in convergents(coeffs):
            if q > 0 and self.circle_distance(self.rotate(self.pot.mp(0), q), 0) < cell:
                out.append(q)
            if len(out) >= 4:
                break
        return out

    def close(self, p1: SkewPoint, p2: SkewPoint, cell=None) -> bool:
        cell = 2.0**-10 if cell is None else float(cell)
        return p1.level == p2.level and self.circle_distance(p1.base, p2.base) < cell


class RotationII(CircleModel):
    """(x, t) + e1 = (x + alpha, phi(x) + t + 1), (x, t) + e2 = (x, t + 1), phi = h o R - h."""

    name = "rotation2"
    type_label = "II"
    basis = "e"

    def __init__(self, alpha, eta, pot: Potential):
        if pot.theta != 1:
            raise VariantMismatch("the type II rotation model needs theta = 1")
        if not pot.beta > 0:
            raise ValueError("beta must be positive")
        self.pot = pot
        self.alpha, self.alpha_form, self.cf = parse_angle(alpha, pot)
        self.eta = parse_param(eta, pot)
        if not 0 < self.eta < min(self.alpha, 1 - self.alpha):
            raise ValueError("need 0 < eta < min(alpha, 1 - alpha)")
        weight = float(pot.exp(pot.beta))
        self.density = CircleDensity([0.0, float(self.eta), 1.0], [weight, 1.0], pot)

    def h(self, x) -> int:
        return 1 if x < self.eta else 0

    def phi(self, x) -> int:
        return self.h(self.rotate(x, 1)) - self.h(x)

    def act(self, pt: SkewPoint, s: GroupElement) -> SkewPoint:
        y = self.rotate(pt.base, s.a)
        return SkewPoint(y, pt.level + s.a + s.b + self.h(y) - self.h(pt.base))

    def in_x(self, pt: SkewPoint) -> bool:
        return pt.level >= 0

    def cocycle(self, s: GroupElement, pt: SkewPoint) -> int:
        """sum_{k<a} phi(R^k x), which telescopes to h(R^a x) - h(x)."""
        return self.h(self.rotate(pt.base, s.a)) - self.h(pt.base)

    def column_threshold(self, pt: SkewPoint, col: int) -> int:
        return pt.level - col + self.h(self.rotate(pt.base, -col)) - self.h(pt.base)

    def recurrences(self, pt: SkewPoint, cell=None, count: int = 4) -> list[GroupElement]:
        out = []
        for q in self.return_times(cell)[:count]:
            for m in (q, -q):
                out.append(GroupElement(m, -m - self.cocycle(GroupElement(m, 0), pt)))
        return out

    def nu_exact(self, a: float, b: float) -> float:
        """nu([a, b)) for 0 <= a <= b <= 1 by direct integration of e^{beta h}."""
        beta, eta = float(self.pot.beta), float(self.eta)
        z = eta * np.exp(beta) + 1 - eta
        inside = max(0.0, min(b, eta) - min(a, eta))
        return (inside * np.exp(beta) + (b - a - inside)) / z

    def _pieces(self, a: float, b: float):
        """Split [a, b) where phi may jump: 0, eta, 1 - alpha, 1 - alpha + eta."""
        alpha, eta = float(self.alpha), float(self.eta)
        cuts = sorted({a, b} | {c % 1.0 for c in (0.0, eta, 1 - alpha, 1 - alpha + eta) if a < c % 1.0 < b})
        for lo, hi in zip(cuts[:-1], cuts[1:]):
            yield lo, hi, self.phi(self.pot.mp((lo + hi) / 2))

    def check_rn(self, trials: int = 50, seed: int = 0) -> float:
        """max |nu(R_alpha E) - int_E e^{beta phi} d nu| over random intervals E."""
        rng = np.random.default_rng(seed)
        beta, alpha = float(self.pot.beta), float(self.alpha)
        worst = 0.0
        for _ in range(trials):
            a, b = np.sort(rng.random(2))
            integral = sum(np.exp(beta * v) * self.density.mass(lo, hi) for lo, hi, v in self._pieces(a, b))
            worst = max(worst, abs(self.density.arc(a + alpha, b + alpha) - integral))
        return worst

    def check_conformality(self, trials: int = 50, seed: int = 0) -> float:
        """mu(E + e1) = e^{-beta} mu(E), mu(E + e2) = e^{-beta} mu(E) for E = [a, b) x {n}."""
        rng = np.random.default_rng(seed)
        beta, alpha = float(self.pot.beta), float(self.alpha)

        def mu(a, b, n):
            return (1 - np.exp(-beta)) * np.exp(-beta * n) * self.density.arc(a, b)

        worst = 0.0
        for _ in range(trials):
            a, b = np.sort(rng.random(2))
            n = int(rng.integers(0, 6))
            base = mu(a, b, n)
            image = sum(mu(lo + alpha, hi + alpha, n + v + 1) for lo, hi, v in self._pieces(a, b))
            worst = max(worst, abs(image - np.exp(-beta) * base), abs(mu(a, b, n + 1) - np.exp(-beta) * base))
        return worst


class RotationIII(CircleModel):
    """(x, t) + v1 = (x + alpha, 1_[s,1)(x) + t), (x, t) + v2 = (x, t + 1), s = gamma/(gamma+1).

    The base measure m with d(m o R_alpha)/dm = e^{-beta F_gamma} is estimated
    numerically; the type III label is carried by citation only.
    """

    name = "rotation3"
    type_label = "III"
    basis = "v"

    def __init__(self, alpha, gamma, pot: Potential, grid_size: int = 1 << 14, estimate: bool = True):
        gamma = parse_param(gamma, pot)
        if gamma <= 0:
            raise ValueError("gamma must be positive")
        if gamma == 1:
            if pot.theta != 1:
                raise VariantMismatch("gamma = 1 needs theta = 1")
        elif abs(gamma - pot.mp(pot.theta)) > pot.eps() * 64 or pot.exact:
            raise VariantMismatch("gamma must equal theta (irrational) or be 1 with theta = 1")
        if not pot.beta > 0:
            raise ValueError("beta must be positive")
        self.pot = pot
        self.gamma = gamma
        self.alpha, self.alpha_form, self.cf = parse_angle(alpha, pot)
        self.split = gamma / (gamma + 1)
        self.F = nakada_potential(float(gamma))
        self.estimate = None
        self.density = None
        if estimate:
            self.estimate = transfer_density_estimate(self.F, float(self.alpha), float(pot.beta), grid_size)
            self.density = self.estimate.density

    def hypotheses(self) -> dict:
        """Diophantine hypotheses: exact for declared forms, otherwise "assumed"."""
        bpq = "assumed"
        if self.cf is not None:
            bpq = "exact" if bounded_partial_quotients(self.cf, max(self.cf.preperiod + self.cf.period)) else "fails"
        elif self.alpha_form is not None and is_quadratic_irrational(self.alpha_form):
            bpq = "exact"  # eventually periodic expansion
        out = {"bounded_partial_quotients": bpq}
        if self.gamma != 1:
            theta_form = symbolic(self.pot.theta_form) if self.pot.theta_form else None
            split_form = None if theta_form is None else theta_form / (theta_form + 1)
            member = in_q_plus_q_alpha(split_form, self.alpha_form) if self.alpha_form is not None else None
            out["split_not_in_Q_plus_Q_alpha"] = "assumed" if member is None else ("exact" if not member else "fails")
        return out

    def ind(self, x) -> int:
        return 1 if x >= self.split else 0

    def steps(self, x, m: int) -> int:
        """D(m, x): level change of m v1-steps from x."""
        total = 0
        if m > 0:
            y = x
            for _ in range(m):
                total += self.ind(y)
                y = self.rotate(y, 1)
        elif m < 0:
            y = x
            for _ in range(-m):
                y = self.rotate(y, -1)
                total -= self.ind(y)
        return total

    def act(self, pt: SkewPoint, s: GroupElement) -> SkewPoint:
        m, n = to_v_coords(s)
        return SkewPoint(self.rotate(pt.base, m), pt.level + self.steps(pt.base, m) + n)

    def in_x(self, pt: SkewPoint) -> bool:
        return pt.level >= 0

    def cocycle(self, s: GroupElement, pt: SkewPoint) -> int:
        return self.steps(pt.base, to_v_coords(s)[0])

    def column_threshold(self, pt: SkewPoint, col: int) -> int:
        """In v-coordinates: n <= t + D(-M, x)."""
        return pt.level + self.steps(pt.base, -col)

    def recurrences(self, pt: SkewPoint, cell=None, count: int = 4) -> list[GroupElement]:
        out = []
        for q in self.return_times(cell)[:count]:
            for m in (q, -q):
                out.append(from_v_coords(m, -self.steps(pt.base, m)))
        return out

    def check_rn(self, trials: int = 50, seed: int = 0) -> float:
        if self.density is None:
            raise VariantMismatch("no density estimate attached")
        rng = np.random.default_rng(seed)
        worst = 0.0
        for _ in range(trials):
            a, b = np.sort(rng.random(2))
            worst = max(worst, rn_deviation(self.density, self.F, self.alpha, self.pot.beta, a, b))
        return worst

    def check_conformality(self, trials: int = 50, seed: int = 0) -> float:
        """mu(E + v1) = e^{-beta} mu(E) and mu(E + v2) = e^{-beta(1+theta)} mu(E)."""
        if self.density is None:
            raise VariantMismatch("no density estimate attached")
        rng = np.random.default_rng(seed)
        beta, alpha, split = float(self.pot.beta), float(self.alpha), float(self.split)
        q = float(self.pot.level_ratio)

        def mu(a, b, n):
            return (1 - q) * q**n * self.density.arc(a, b)

        worst = 0.0
        for _ in range(trials):
            a, b = np.sort(rng.random(2))
            n = int(rng.integers(0, 6))
            base = mu(a, b, n)
            cuts = sorted({a, b} | ({split} if a < split < b else set()))
            image = sum(mu(lo + alpha, hi + alpha, n + (1 if (lo + hi) / 2 >= split else 0))
                        for lo, hi in zip(cuts[:-1], cuts[1:]))
            worst = max(worst, abs(image - np.exp(-beta) * base), abs(mu(a, b, n + 1) - q * base))
        return worst


def rotation_type2(alpha, eta, pot: Potential) -> RotationII:
    return RotationII(alpha, eta, pot)


def rotation_type3(alpha, gamma, pot: Potential, grid_size: int = 1 << 14) -> RotationIII:
    return RotationIII(alpha, gamma, pot, grid_size)
