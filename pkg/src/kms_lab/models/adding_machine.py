"""The dyadic adding machine skew product (theta = 1, type III by citation).

Points of the one-sided space carry a declared periodic tail containing both
symbols, so odometer carries always terminate and the eventually constant
null set never appears.  With p rational and e^beta = (1-p)/p every cylinder
mass below is an exact Fraction.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ..errors import VariantMismatch
from ..lattice import E1, E2, GroupElement, Potential
from ..measures import Cylinder, DyadicProduct
from ..symbolic import Word, _min_period
from .base import ModelSystem, SkewPoint


@dataclass(frozen=True)
class DyadicPoint:
    """x = (x_1, x_2, ...) = prefix followed by tail repeated forever."""

    prefix: Word
    tail: Word

    def __post_init__(self):
        prefix = tuple(int(b) for b in self.prefix)
        tail = tuple(int(b) for b in self.tail)
        if not tail or set(tail) != {0, 1}:
            raise ValueError("tail must contain both symbols (no eventually constant points)")
        if any(b not in (0, 1) for b in prefix):
            raise ValueError("prefix must be binary")
        tail = tail[:_min_period(tail)]
        prefix = list(prefix)
        while prefix and prefix[-1] == tail[-1]:
            prefix.pop()
            tail = tail[-1:] + tail[:-1]
        object.__setattr__(self, "prefix", tuple(prefix))
        object.__setattr__(self, "tail", tail)

    def bit(self, n: int) -> int:
        """x_n for n >= 1."""
        if n < 1:
            raise IndexError("coordinates start at 1")
        d = len(self.prefix)
        if n <= d:
            return self.prefix[n - 1]
        return self.tail[(n - d - 1) % len(self.tail)]

    def word(self, depth: int) -> Word:
        return tuple(self.bit(n) for n in range(1, depth + 1))

    def first_zero(self) -> int:
        n = 1
        while self.bit(n):
            n += 1
        return n

    def __str__(self) -> str:
        return "".join(map(str, self.prefix)) + "(" + "".join(map(str, self.tail)) + ")*"


def phi(x: DyadicPoint) -> int:
    """min{n >= 1 : x_n = 0} - 2."""
    return x.first_zero() - 2


def odometer(x: DyadicPoint, m: int) -> tuple[DyadicPoint, int]:
    """(tau^m x, c(m, x)) where c(m, x) = sum_{k<m} phi(tau^k x).

    Adding m to the 2-adic integer x changes finitely many bits; the cocycle
    telescopes to (ones of x) - (ones of tau^m x) over those bits.
    """
    if m == 0:
        return x, 0
    d, period = len(x.prefix), len(x.tail)
    need = max(abs(m).bit_length(), 1)
    blocks = -(-need // period) + 1
    bits = x.prefix + x.tail * blocks
    width = len(bits)
    value = sum(b << i for i, b in enumerate(bits))
    moved = value + m
    # the top block is a full tail period holding a 0 and a 1, so no carry or borrow escapes
    assert 0 <= moved < (1 << width)
    y = DyadicPoint(tuple((moved >> i) & 1 for i in range(width)), x.tail)
    return y, bin(value).count("1") - bin(moved).count("1")


def separation_witness(x: DyadicPoint, y: DyadicPoint) -> int:
    """m with phi(tau^m x) != phi(tau^m y) for x != y.

    k is the first index where they differ, arranged so that x_k = 0; then
    m = 2^{k-1} - 1 - (x_1 + 2 x_2 + ... + 2^{k-2} x_{k-1}).
    """
    k = 1
    while x.bit(k) == y.bit(k):
        k += 1
        if k > 4 * (len(x.prefix) + len(y.prefix) + len(x.tail) * len(y.tail)) + 8:
            raise ValueError("points are equal")
    if x.bit(k) == 1:
        x, y = y, x
    low = sum(x.bit(j) << (j - 1) for j in range(1, k))
    return (1 << (k - 1)) - 1 - low


class AddingMachine(ModelSystem):
    """(x, t) + e1 = (tau x, phi(x) + t + 1), (x, t) + e2 = (x, t + 1), X = Omega x N."""

    name = "adding-machine"
    type_label = "III"
    basis = "e"

    def __init__(self, pot: Potential, p: Fraction | None = None):
        if pot.theta != 1:
            raise VariantMismatch("the adding machine model needs theta = 1")
        if not pot.beta > 0:
            raise ValueError("beta must be positive")
        self.pot = pot
        if p is None:
            # rational approximation of 1/(1 + e^beta); masses are then exact for that p only
            p = Fraction(float(1 / (1 + pot.exp(pot.beta)))).limit_denominator(10**12)
            self.exact = False
        else:
            p = Fraction(p)
            if abs(pot.exp(pot.beta) - pot.mp((1 - p) / p)) > pot.eps() * 64:
                raise ValueError("p does not satisfy (1-p)/p = e^beta")
            self.exact = True
        self.p = p
        self.base_measure = DyadicProduct(p, coords="N")
        self.ratio = (1 - p) / p  # e^beta
        self.r = p / (1 - p)  # e^{-beta}

    @classmethod
    def from_p(cls, p, precision: int = 128) -> "AddingMachine":
        """Model with e^beta = (1-p)/p exactly; beta stored at precision."""
        from ..reals import context, to_mpf
        p = Fraction(p)
        ctx = context(precision)
        beta = ctx.log(to_mpf((1 - p) / p, precision))
        return cls(Potential(beta, 1, precision), p)

    # action

    def act(self, pt: SkewPoint, s: GroupElement) -> SkewPoint:
        y, c = odometer(pt.base, s.a)
        return SkewPoint(y, pt.level + s.a + s.b + c)

    def in_x(self, pt: SkewPoint) -> bool:
        return pt.level >= 0

    def cocycle(self, s: GroupElement, pt: SkewPoint) -> int:
        return odometer(pt.base, s.a)[1]

    def column_threshold(self, pt: SkewPoint, col: int) -> int:
        """n <= -m + c(-m, x) + t."""
        return pt.level - col + odometer(pt.base, -col)[1]

    def sample_point(self, rng: np.random.Generator) -> SkewPoint:
        prefix = tuple(int(b) for b in rng.integers(0, 2, size=int(rng.integers(0, 16))))
        while True:
            tail = tuple(int(b) for b in rng.integers(0, 2, size=int(rng.integers(2, 5))))
            if set(tail) == {0, 1}:
                break
        return SkewPoint(DyadicPoint(prefix, tail), int(rng.integers(-4, 12)))

    def separation_witness_holds(self, p1: SkewPoint, p2: SkewPoint) -> bool | None:
        if p1.base == p2.base:
            return None
        m = separation_witness(p1.base, p2.base)
        return phi(odometer(p1.base, m)[0]) != phi(odometer(p2.base, m)[0])

    # recurrences for the ratio-set sampler

    def recurrences(self, pt: SkewPoint, cell=10, count: int = 4) -> list[GroupElement]:
        """m = j 2^depth fixes the first ``depth`` coordinates; n restores the level."""
        depth = 10 if cell is None else int(cell)
        out = []
        for j in range(1, count + 1):
            for m in (j << depth, -(j << depth)):
                c = odometer(pt.base, m)[1]
                out.append(GroupElement(m, -m - c))
        return out

    def close(self, p1: SkewPoint, p2: SkewPoint, cell=10) -> bool:
        depth = 10 if cell is None else int(cell)
        return p1.level == p2.level and p1.base.word(depth) == p2.base.word(depth)

    # measures

    def mu(self, word: Word) -> Fraction:
        return self.base_measure.mass(Cylinder.word(1, word))

    def mu_bar(self, word: Word, level: int) -> Fraction:
        return (1 - self.r) * self.r**level * self.mu(word)

    def image_mass_e1(self, word: Word, level: int) -> Fraction:
        """mu_bar(([word] x {level}) + e1), computed piecewise from the action."""
        d = len(word)
        if 0 in word:
            j = word.index(0) + 1
            image = (0,) * (j - 1) + (1,) + tuple(word[j:])
            return self.mu_bar(image, level + (j - 2) + 1)
        # all ones: the first zero sits at j > d; the pieces [1^{j-1} 0] go to [0^{j-1} 1] x {level + j - 1}
        # sum_{j>d} (1-r) r^{level+j-1} (1-p)^{j-1} p, a geometric series with ratio r(1-p) = p
        head = (1 - self.r) * self.r**level * self.p * (self.r * (1 - self.p)) ** d
        return head / (1 - self.r * (1 - self.p))

    def rn_sides(self, word: Word) -> tuple[Fraction, Fraction]:
        """(mu(tau C), integral over C of e^{beta phi} d mu) for C = [word]."""
        d = len(word)
        if 0 in word:
            j = word.index(0) + 1
            image = (0,) * (j - 1) + (1,) + tuple(word[j:])
            return self.mu(image), self.ratio ** (j - 2) * self.mu(word)
        # C = [1^d]: split by the first zero j > d
        lhs = _geometric(self.p * (1 - self.p) ** d, 1 - self.p)  # sum_{j>d} mu([0^{j-1} 1])
        rhs = _geometric(self.ratio ** (d - 1) * self.p**d * (1 - self.p), self.ratio * self.p)
        return lhs, rhs

    def check_rn(self, depth: int = 12) -> dict:
        worst, count = Fraction(0), 0
        for d in range(1, depth + 1):
            for word in itertools.product((0, 1), repeat=d):
                lhs, rhs = self.rn_sides(word)
                worst = max(worst, abs(lhs - rhs))
                count += 1
        return {"cylinders": count, "max_deviation": worst, "exact": worst == 0}

    def check_conformality(self, depth: int = 12, levels=(0, 3)) -> dict:
        """mu_bar(E + e1) = e^{-beta} mu_bar(E) and mu_bar(E + e2) = e^{-beta} mu_bar(E), exactly."""
        worst, count = Fraction(0), 0
        for d in range(1, depth + 1):
            for word in itertools.product((0, 1), repeat=d):
                for n in levels:
                    base = self.mu_bar(word, n)
                    worst = max(worst, abs(self.image_mass_e1(word, n) - self.r * base))
                    worst = max(worst, abs(self.mu_bar(word, n + 1) - self.r * base))
                    count += 1
        return {"cylinders": count, "max_deviation": worst, "exact": worst == 0}


def _geometric(first: Fraction, ratio: Fraction) -> Fraction:
    return first / (1 - ratio)


def adding_machine(pot: Potential, p=None) -> AddingMachine:
    return AddingMachine(pot, p)


def prefix_points(depth: int, tail: Word = (0, 1), level: int = 0) -> list[SkewPoint]:
    return [SkewPoint(DyadicPoint(tuple((i >> j) & 1 for j in range(depth)), tail), level)
            for i in range(1 << depth)]


def separation_bruteforce(depth: int = 10, tail: Word = (0, 1)) -> dict:
    """Witness formula over all pairs of distinct depth-``depth`` prefixes."""
    pts = [p.base for p in prefix_points(depth, tail)]
    phis = {}
    checked = failures = 0
    for i, x in enumerate(pts):
        for y in pts[i + 1:]:
            m = separation_witness(x, y)
            for z in (x, y):
                if (z, m) not in phis:
                    phis[z, m] = phi(odometer(z, m)[0])
            checked += 1
            failures += phis[x, m] == phis[y, m]
    return {"pairs": checked, "failures": failures}


def q_signature(model: AddingMachine, pt: SkewPoint, window: int) -> tuple[int, ...]:
    """Q_pt within [-window, window]^2, encoded by clipped column thresholds."""
    return tuple(max(-window - 1, min(window, model.column_threshold(pt, col)))
                 for col in range(-window, window + 1))


def q_injectivity_bruteforce(model: AddingMachine, depth: int = 10, window: int = 12,
                             tail: Word = (0, 1)) -> dict:
    """Count pairs of distinct prefixes whose Q-sets agree on the square window.

    Also checks the column predicted by the separation lemma: if
    phi(tau^m x) != phi(tau^m y) first at m, the Q-columns at -(m+1) differ.
    """
    pts = prefix_points(depth, tail)
    sigs: dict[tuple, int] = {}
    for pt in pts:
        sig = q_signature(model, pt, window)
        sigs[sig] = sigs.get(sig, 0) + 1
    unseparated = sum(k * (k - 1) // 2 for k in sigs.values())
    witness_fail = 0
    widest = 0
    memo: dict[tuple[int, int], int] = {}

    def threshold(i, col):
        if (i, col) not in memo:
            memo[i, col] = model.column_threshold(pts[i], col)
        return memo[i, col]

    for i, p1 in enumerate(pts):
        for j in range(i + 1, len(pts)):
            m = separation_witness(p1.base, pts[j].base)
            col = -(m + 1)
            widest = max(widest, abs(col))
            if threshold(i, col) == threshold(j, col):
                witness_fail += 1
    pairs = len(pts) * (len(pts) - 1) // 2
    return {"pairs": pairs, "unseparated_in_window": unseparated, "window": window,
            "witness_column_failures": witness_fail, "widest_witness_column": widest}
