"""Conformal measures on Omega and their lifts to Omega x Z.

Variants: :class:`AtomicOrbit` (canonical measure on the shift orbit of a
finitely described sequence), :class:`DyadicProduct` (i.i.d. Bernoulli
coordinates), :class:`CircleDensity` (piecewise-constant density on [0,1)),
:class:`LineExponential` (beta e^{-beta t} dt on [0, inf)) and
:class:`Lifted` (the product-type measure on Omega x Z).
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import DivergentSeries, PeriodicObstruction, UnsupportedCylinder, VariantMismatch
from .lattice import GroupElement, Potential, existence_gate, to_v_coords
from .reals import to_float, to_mpf
from .symbolic import BiSeq, Word, birkhoff, is_periodic, shift

DEFAULT_DEPTH_CAP = 12
MAX_ENUMERATED_WINDOW = 20


@dataclass(frozen=True)
class Cylinder:
    """Finitely many coordinate constraints, optionally with a level (for Omega x Z)."""

    constraints: tuple[tuple[int, int], ...] = ()
    level: int | None = None
    empty: bool = False

    @classmethod
    def of(cls, constraints=(), level: int | None = None) -> "Cylinder":
        items = constraints.items() if isinstance(constraints, dict) else constraints
        merged: dict[int, int] = {}
        for k, b in items:
            k, b = int(k), int(b)
            if b not in (0, 1):
                raise ValueError("cylinder bits must be 0 or 1")
            if merged.get(k, b) != b:
                return cls((), level, True)
            merged[k] = b
        return cls(tuple(sorted(merged.items())), level, False)

    @classmethod
    def word(cls, lo: int, word: Word, level: int | None = None) -> "Cylinder":
        return cls.of({lo + i: b for i, b in enumerate(word)}, level)

    @property
    def mapping(self) -> dict[int, int]:
        return dict(self.constraints)

    def window(self) -> tuple[int, int]:
        if not self.constraints:
            return 0, 0
        return self.constraints[0][0], self.constraints[-1][0] + 1

    def intersect(self, other: "Cylinder") -> "Cylinder":
        if self.empty or other.empty:
            return Cylinder((), self.level, True)
        if self.level is not None and other.level is not None and self.level != other.level:
            return Cylinder((), self.level, True)
        level = self.level if self.level is not None else other.level
        return Cylinder.of(self.constraints + other.constraints, level)

    def shifted(self, k: int, level_shift: int = 0) -> "Cylinder":
        """tau^k(C): the constraint at j moves to j + k."""
        level = None if self.level is None else self.level + level_shift
        return Cylinder(tuple((j + k, b) for j, b in self.constraints), level, self.empty)

    def contains(self, x: BiSeq) -> bool:
        return not self.empty and all(x.bit(k) == b for k, b in self.constraints)

    def __str__(self) -> str:
        if self.empty:
            return "{}(empty)"
        body = ",".join(f"{k}:{b}" for k, b in self.constraints)
        suffix = "" if self.level is None else f"@{self.level}"
        return "{" + body + "}" + suffix


class OmegaMeasure:
    """Common interface of measures on Omega (masses of cylinders, window marginals)."""

    variant = "abstract"
    certified_tail = 0

    def mass(self, cyl: Cylinder):
        raise NotImplementedError

    def window_distribution(self, lo: int, hi: int) -> dict[Word, object]:
        raise NotImplementedError

    def _mass_from_window(self, cyl: Cylinder):
        lo, hi = cyl.window()
        dist = self.window_distribution(lo, hi)
        if len(cyl.constraints) == hi - lo:
            return dist.get(tuple(b for _, b in cyl.constraints), 0)
        req = [(k - lo, b) for k, b in cyl.constraints]
        return sum((w for word, w in dist.items() if all(word[i] == b for i, b in req)), 0)


@dataclass(frozen=True)
class AtomicOrbit(OmegaMeasure):
    """Measure on the orbit {tau^n base} with weights e^{-beta S_n}/Z.

    ``weights`` lists (n, w_n) for the explicitly summed range; the mass left
    out by truncation is exactly ``tail_bound`` (closed-form geometric tails).
    """

    base: BiSeq
    pot: Potential
    norm: object
    tail_bound: object
    weights: tuple[tuple[int, object], ...]
    period: int | None = None
    _cache: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    variant = "AtomicOrbit"

    @property
    def certified_tail(self):
        return self.tail_bound

    def weight(self, n: int):
        return dict(self.weights).get(n, 0)

    def window_distribution(self, lo: int, hi: int) -> dict[Word, object]:
        key = (lo, hi)
        if key not in self._cache:
            dist: dict[Word, object] = {}
            for n, w in self.weights:
                # (tau^n x)_k = x_{k-n}
                word = self.base.word(lo - n, hi - n)
                dist[word] = dist.get(word, 0) + w
            self._cache[key] = dist
        return self._cache[key]

    def mass(self, cyl: Cylinder):
        if cyl.empty:
            return 0
        if not cyl.constraints:
            return sum((w for _, w in self.weights), 0)
        return self._mass_from_window(cyl)


def orbit_measure(x: BiSeq, pot: Potential, tol=1e-30) -> AtomicOrbit:
    """The conformal measure carried by the shift orbit of ``x``.

    Periodic x needs S_p = 0 and yields weights e^{-beta S_j}/Z, j = 0..p-1.
    Aperiodic x needs both tail drifts positive; the series is summed
    explicitly until each closed-form geometric remainder is below tol/4.
    """
    if not existence_gate(pot):
        raise DivergentSeries("no conformal measure outside beta > 0, theta >= 0")
    ctx = pot.ctx
    beta = pot.mp(pot.beta)
    p = is_periodic(x)
    if p is not None:
        if birkhoff(x, p, pot) != 0:
            raise PeriodicObstruction(f"S_{p} = {birkhoff(x, p, pot)} != 0 on a periodic orbit")
        raw = [ctx.exp(-beta * pot.mp(birkhoff(x, j, pot))) for j in range(p)]
        z = ctx.fsum(raw)
        return AtomicOrbit(x, pot, z, ctx.mpf(0), tuple((j, w / z) for j, w in enumerate(raw)), p)

    L, R = len(x.left), len(x.right)
    drift_pos = L - (1 + pot.theta) * sum(x.left)   # S_{n+L} - S_n deep in the left tail
    drift_neg = -R + (1 + pot.theta) * sum(x.right)  # S_{-(n+R)} - S_{-n} deep in the right tail
    if drift_pos <= 0 or drift_neg <= 0:
        raise DivergentSeries(f"tail drifts ({drift_pos}, {drift_neg}) not both positive")

    def term(n):
        return ctx.exp(-beta * pot.mp(birkhoff(x, n, pot)))

    n0_pos = max(1, -x.start)
    n0_neg = max(1, x.stop)
    rho_pos = ctx.exp(-beta * pot.mp(drift_pos))
    rho_neg = ctx.exp(-beta * pot.mp(drift_neg))
    block_pos = ctx.fsum(term(n0_pos + j) for j in range(L))
    block_neg = ctx.fsum(term(-(n0_neg + j)) for j in range(R))
    finite = [term(n) for n in range(-(n0_neg - 1), n0_pos)]
    z = ctx.fsum(finite) + block_pos / (1 - rho_pos) + block_neg / (1 - rho_neg)

    target = to_mpf(tol, pot.precision) / 4

    def periods_needed(block, rho):
        q = 0
        rem = block / (1 - rho) / z
        while rem > target:
            rem *= rho
            q += 1
        return q, rem

    q_pos, rem_pos = periods_needed(block_pos, rho_pos)
    q_neg, rem_neg = periods_needed(block_neg, rho_neg)
    hi = n0_pos + q_pos * L
    lo = -(n0_neg - 1) - q_neg * R
    weights = tuple((n, term(n) / z) for n in range(lo, hi))
    return AtomicOrbit(x, pot, z, rem_pos + rem_neg, weights, None)


@dataclass(frozen=True)
class DyadicProduct(OmegaMeasure):
    """Every coordinate independently 1 with probability p, with (1-p)/p = e^beta."""

    p: Fraction
    coords: str = "Z"  # "Z" for Omega, "N" for the one-sided adding-machine space

    variant = "DyadicProduct"

    def __post_init__(self):
        p = Fraction(self.p)
        if not 0 < p < Fraction(1, 2):
            raise ValueError("p must lie in (0, 1/2) so that beta > 0")
        object.__setattr__(self, "p", p)

    @property
    def ratio(self) -> Fraction:
        return (1 - self.p) / self.p

    def beta(self, precision: int = 128):
        from .reals import context
        ctx = context(precision)
        return ctx.log(to_mpf(self.ratio, precision))

    def matches(self, pot: Potential) -> bool:
        return abs(pot.exp(pot.beta) - to_mpf(self.ratio, pot.precision)) <= pot.eps() * 64

    def bit_mass(self, b: int) -> Fraction:
        return self.p if b else 1 - self.p

    def mass(self, cyl: Cylinder) -> Fraction:
        if cyl.empty:
            return Fraction(0)
        out = Fraction(1)
        for k, b in cyl.constraints:
            if self.coords == "N" and k < 1:
                raise UnsupportedCylinder("one-sided product measure lives on coordinates >= 1")
            out *= self.bit_mass(b)
        return out

    def window_distribution(self, lo: int, hi: int) -> dict[Word, Fraction]:
        if hi - lo > MAX_ENUMERATED_WINDOW:
            raise UnsupportedCylinder(f"window of width {hi - lo} exceeds {MAX_ENUMERATED_WINDOW}")
        dist = {}
        for word in itertools.product((0, 1), repeat=hi - lo):
            w = Fraction(1)
            for b in word:
                w *= self.bit_mass(b)
            dist[word] = w
        return dist


@dataclass(frozen=True)
class CircleDensity:
    """Piecewise-constant probability density on [0, 1)."""

    breaks: np.ndarray
    density: np.ndarray
    pot: Potential | None = None
    _cdf: np.ndarray = field(init=False, repr=False, compare=False)

    variant = "CircleDensity"

    def __post_init__(self):
        breaks = np.asarray(self.breaks, dtype=float)
        density = np.asarray(self.density, dtype=float)
        if breaks[0] != 0.0 or breaks[-1] != 1.0 or np.any(np.diff(breaks) <= 0):
            raise ValueError("breaks must increase strictly from 0 to 1")
        if len(density) != len(breaks) - 1 or np.any(density < 0):
            raise ValueError("need one nonnegative density value per cell")
        cdf = np.concatenate([[0.0], np.cumsum(density * np.diff(breaks))])
        density = density / cdf[-1]
        cdf = cdf / cdf[-1]
        object.__setattr__(self, "breaks", breaks)
        object.__setattr__(self, "density", density)
        object.__setattr__(self, "_cdf", cdf)

    def cdf(self, x) -> np.ndarray:
        x = np.clip(np.asarray(x, dtype=float), 0.0, 1.0)
        i = np.clip(np.searchsorted(self.breaks, x, side="right") - 1, 0, len(self.density) - 1)
        return self._cdf[i] + self.density[i] * (x - self.breaks[i])

    def mass(self, a, b) -> float:
        """Mass of the arc from a to b (counter-clockwise, wrapping if a > b)."""
        a, b = float(a) % 1.0, float(b) % 1.0
        if a <= b:
            return float(self.cdf(b) - self.cdf(a))
        return float(1.0 - self.cdf(a) + self.cdf(b))

    def arc(self, a, b) -> float:
        """Mass of the image of [a, b) in R/Z for real a <= b <= a + 1."""
        def lifted(x):
            k = np.floor(x)
            return k + self.cdf(x - k)
        return float(lifted(float(b)) - lifted(float(a)))

    def value_at(self, x) -> float:
        i = int(np.searchsorted(self.breaks, float(x) % 1.0, side="right") - 1)
        return float(self.density[min(i, len(self.density) - 1)])


@dataclass(frozen=True)
class LineExponential:
    """beta e^{-beta t} dt restricted to [0, inf)."""

    pot: Potential

    variant = "LineExponential"

    def mass(self, a, b):
        ctx, beta = self.pot.ctx, self.pot.mp(self.pot.beta)
        a = max(self.pot.mp(a), 0)
        b = self.pot.mp(b) if b != float("inf") else ctx.inf
        if b <= a:
            return ctx.mpf(0)
        return ctx.exp(-beta * a) - (0 if b == ctx.inf else ctx.exp(-beta * max(b, 0)))


@dataclass(frozen=True)
class Lifted:
    """m_bar(E x {n}) = (1 - q) q^n m(E) with q = e^{-beta(1+theta)}."""

    inner: OmegaMeasure
    pot: Potential

    variant = "Lifted"

    @property
    def q(self):
        return self.pot.level_ratio

    @property
    def certified_tail(self):
        return self.inner.certified_tail

    def slice_mass(self, n: int):
        q = self.q
        return (1 - q) * q**n

    def mass(self, cyl: Cylinder):
        if cyl.empty:
            return 0
        inner = self.inner.mass(Cylinder(cyl.constraints))
        if cyl.level is None:
            return inner  # the whole of Omega x N
        return self.slice_mass(cyl.level) * inner

    def translate(self, cyl: Cylinder, s: GroupElement) -> list[Cylinder]:
        """E + s as a disjoint union of level cylinders (E must carry a level)."""
        if cyl.level is None:
            raise VariantMismatch("translation needs a cylinder with a level")
        if cyl.empty:
            return []
        m, n = to_v_coords(s)
        span = range(-m, 0) if m >= 0 else range(0, -m)
        fixed = cyl.mapping
        free = [k for k in span if k not in fixed]
        pieces = []
        for bits in itertools.product((0, 1), repeat=len(free)):
            full = dict(fixed)
            full.update(zip(free, bits))
            ones = sum(full[k] for k in span)
            dt = ones if m >= 0 else -ones
            base = Cylinder.of(full, cyl.level)
            pieces.append(base.shifted(m, dt + n))
        return pieces


def lift(m: OmegaMeasure, pot: Potential) -> Lifted:
    if pot.beta * (1 + pot.theta) <= 0:
        raise ValueError("lift needs beta(1 + theta) > 0")
    return Lifted(m, pot)


def measure_of_cylinder(m, cyl: Cylinder):
    if isinstance(m, (OmegaMeasure, Lifted)):
        if cyl.level is not None and not isinstance(m, Lifted):
            raise VariantMismatch("level cylinders need a lifted measure")
        return m.mass(cyl)
    raise VariantMismatch(f"{type(m).__name__} has no cylinder sets")


@dataclass
class ConformalityReport:
    variant: str
    depth: int
    max_deviation: float
    worst_cylinder: str
    certified_tail: float
    total_deviation: float
    cylinders: int
    tol: float

    @property
    def passed(self) -> bool:
        return self.total_deviation <= self.tol

    def to_json(self) -> dict:
        return {
            "variant": self.variant,
            "depth": self.depth,
            "max_deviation": self.max_deviation,
            "worst_cylinder": self.worst_cylinder,
            "certified_tail": self.certified_tail,
            "total_deviation": self.total_deviation,
            "cylinders": self.cylinders,
            "passed": self.passed,
        }


def check_conformal(m: OmegaMeasure, pot: Potential, depth: int, tol=1e-10,
                    depth_cap: int = DEFAULT_DEPTH_CAP) -> ConformalityReport:
    """Check m(tau C) = int_C e^{-beta chi} dm on the cylinders of window [-depth, depth].

    The check runs over the full words on the window; ``total_deviation`` sums
    their deviations and so bounds the deviation of every cylinder whose
    constraints lie inside the window.
    """
    if not isinstance(m, OmegaMeasure):
        raise VariantMismatch("check_conformal takes a measure on Omega")
    if depth < 1 or depth > depth_cap:
        raise UnsupportedCylinder(f"depth {depth} outside [1, {depth_cap}]")
    lo, hi = -depth, depth + 1
    here = m.window_distribution(lo, hi)
    moved = m.window_distribution(lo + 1, hi + 1)
    factor = {0: pot.boltzmann(1), 1: pot.boltzmann(-pot.theta)}
    worst, worst_word, total = 0.0, None, 0.0
    words = set(here) | set(moved)
    for word in words:
        lhs = moved.get(word, 0)
        rhs = factor[word[-1 - lo]] * here.get(word, 0)
        dev = abs(float(lhs - rhs)) if not isinstance(lhs, Fraction) else abs(float(pot.mp(lhs) - rhs))
        total += dev
        if dev > worst or worst_word is None:
            worst, worst_word = dev, word
    worst_cyl = str(Cylinder.word(lo, worst_word)) if worst_word is not None else "{}"
    return ConformalityReport(m.variant, depth, worst, worst_cyl, to_float(m.certified_tail),
                              total, len(words), float(tol))


def random_cylinder(rng: np.random.Generator, depth: int, levels=(-3, 6)) -> Cylinder:
    width = int(rng.integers(1, 2 * depth + 2))
    lo = int(rng.integers(-depth, depth + 2 - width))
    keep = rng.random(width) < 0.7
    bits = rng.integers(0, 2, size=width)
    cons = {lo + i: int(bits[i]) for i in range(width) if keep[i]}
    return Cylinder.of(cons, int(rng.integers(levels[0], levels[1])))


@dataclass
class LiftReport:
    trials: int
    max_deviation_v1: float
    max_deviation_v2: float
    worst_cylinder: str
    tol: float

    @property
    def passed(self) -> bool:
        return max(self.max_deviation_v1, self.max_deviation_v2) <= self.tol


def check_lift_identities(mbar: Lifted, trials: int = 100, seed: int = 0, depth: int = 8,
                          tol=1e-10) -> LiftReport:
    """m_bar(E + v1) = e^{-beta} m_bar(E) and m_bar(E + v2) = e^{-beta(1+theta)} m_bar(E)."""
    pot = mbar.pot
    rng = np.random.default_rng(seed)
    from .lattice import V1, V2
    factors = {V1: pot.boltzmann(1), V2: pot.level_ratio}
    worst = {V1: 0.0, V2: 0.0}
    worst_cyl = ""
    for _ in range(trials):
        cyl = random_cylinder(rng, depth)
        base = mbar.mass(cyl)
        for s, factor in factors.items():
            image = sum((mbar.mass(piece) for piece in mbar.translate(cyl, s)), 0)
            dev = abs(float(image - factor * base))
            if dev > worst[s]:
                worst[s] = dev
                worst_cyl = f"{cyl} + {s}"
    return LiftReport(trials, worst[V1], worst[V2], worst_cyl, float(tol))


def theta_zero_concentration(m: OmegaMeasure, tol=1e-12) -> bool:
    """True iff m({x : x_{-1} = 0}) <= tol, i.e. m sits on the all-ones sequence."""
    return float(m.mass(Cylinder.of({-1: 0}))) <= float(tol)
