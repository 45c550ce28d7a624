"""The *-algebra spanned by f w_s, its states, and the KMS condition.

f is a cylinder function on the closed unit space: a finite sum of terms
coeff * prod_u [1_A(u) = bit_u] over hereditary sets A containing 0 (points
(x, t) with t >= 0, plus the full group).  Every summand f w_s is stored with
the range projection eps_s folded into f, so f w_s = f eps_s w_s holds
syntactically.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import UncertifiedTail, VariantMismatch
from .lattice import ZERO, GroupElement, Potential, c_value, to_v_coords
from .measures import AtomicOrbit, Cylinder, Lifted
from .symbolic import BiSeq, OmegaZPoint, act, in_hereditary_set, stabilizer_of

Constraints = tuple[tuple[GroupElement, int], ...]


def _below(u: GroupElement, v: GroupElement) -> bool:
    """u in v - N^2."""
    return u.a <= v.a and u.b <= v.b


def simplify(constraints: dict) -> Constraints | None:
    """Normal form of a constraint set on hereditary sets containing 0; None if unsatisfiable."""
    ones = [u for u, b in constraints.items() if b == 1]
    zeros = [u for u, b in constraints.items() if b == 0]
    if any(_below(u, ZERO) for u in zeros):
        return None  # 0 in A forces -N^2 inside A
    if any(_below(z, o) for z in zeros for o in ones):
        return None  # o in A forces z in A
    ones = [u for u in ones if not _below(u, ZERO)]
    ones = [u for u in ones if not any(v != u and _below(u, v) for v in ones)]
    zeros = [u for u in zeros if not any(v != u and _below(v, u) for v in zeros)]
    return tuple(sorted([(u, 1) for u in ones] + [(u, 0) for u in zeros]))


def _join(parts) -> str:
    out = ""
    for p in parts:
        if not out:
            out = p
        elif p.startswith("-"):
            out += " - " + p[1:]
        else:
            out += " + " + p
    return out


@dataclass(frozen=True)
class CylinderFunction:
    """sum of coeff * prod [1_A(u) = bit] with constraints in normal form."""

    terms: tuple[tuple[Constraints, object], ...] = ()

    @classmethod
    def build(cls, pairs) -> "CylinderFunction":
        acc: dict[Constraints, object] = {}
        for constraints, coeff in pairs:
            if coeff == 0:
                continue
            merged: dict = {}
            if any(merged.setdefault(u, b) != b for u, b in constraints):
                continue  # u required both in and out of A
            key = simplify(merged)
            if key is None:
                continue
            acc[key] = acc.get(key, 0) + coeff
        return cls(tuple(sorted(((k, v) for k, v in acc.items() if v != 0), key=lambda kv: kv[0])))

    @classmethod
    def constant(cls, coeff=1) -> "CylinderFunction":
        return cls.build([((), coeff)])

    @classmethod
    def eps(cls, s: GroupElement) -> "CylinderFunction":
        return cls.build([(((s, 1),), 1)])

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __add__(self, other: "CylinderFunction") -> "CylinderFunction":
        return CylinderFunction.build(self.terms + other.terms)

    def __mul__(self, other: "CylinderFunction") -> "CylinderFunction":
        pairs = []
        for k1, c1 in self.terms:
            for k2, c2 in other.terms:
                merged = dict(k1)
                if any(merged.get(u, b) != b for u, b in k2):
                    continue
                merged.update(k2)
                pairs.append((tuple(merged.items()), c1 * c2))
        return CylinderFunction.build(pairs)

    def scale(self, factor) -> "CylinderFunction":
        return CylinderFunction.build([(k, c * factor) for k, c in self.terms])

    def conj(self) -> "CylinderFunction":
        return CylinderFunction.build([(k, c.conjugate()) for k, c in self.terms])

    def keys(self) -> set[GroupElement]:
        return {u for k, _ in self.terms for u, _ in k}

    def __call__(self, A) -> object:
        return sum((c for k, c in self.terms if all(contains(A, u) == b for u, b in k)), 0)

    def __str__(self) -> str:
        return _join(f"{_fmt(c)} * [{', '.join(f'{u}:{b}' for u, b in k)}]" for k, c in self.terms) or "0"


def r_shift(f: CylinderFunction, s: GroupElement) -> CylinderFunction:
    """R_s(f)(A) = f(A - s) 1_A(s)."""
    return CylinderFunction.build([(tuple((u + s, b) for u, b in k) + ((s, 1),), c) for k, c in f.terms])


@dataclass(frozen=True)
class AlgebraElement:
    """sum_s f_s w_s, with each f_s already multiplied by eps_s."""

    summands: tuple[tuple[GroupElement, CylinderFunction], ...] = ()

    @classmethod
    def build(cls, pairs) -> "AlgebraElement":
        acc: dict[GroupElement, CylinderFunction] = {}
        for s, f in pairs:
            acc[s] = acc.get(s, CylinderFunction()) + f
        out = []
        for s in sorted(acc):
            f = acc[s] * CylinderFunction.eps(s)
            if f:
                out.append((s, f))
        return cls(tuple(out))

    @classmethod
    def identity(cls) -> "AlgebraElement":
        return cls.build([(ZERO, CylinderFunction.constant())])

    @classmethod
    def w(cls, s: GroupElement, f: CylinderFunction | None = None) -> "AlgebraElement":
        return cls.build([(s, CylinderFunction.constant() if f is None else f)])

    def __mul__(self, other: "AlgebraElement") -> "AlgebraElement":
        return multiply(self, other)

    def __add__(self, other: "AlgebraElement") -> "AlgebraElement":
        return AlgebraElement.build(self.summands + other.summands)

    def scale(self, factor) -> "AlgebraElement":
        return AlgebraElement.build([(s, f.scale(factor)) for s, f in self.summands])

    def component(self, s: GroupElement) -> CylinderFunction:
        return dict(self.summands).get(s, CylinderFunction())

    def __str__(self) -> str:
        parts = []
        for s, f in self.summands:
            for k, c in f.terms:
                body = ", ".join(f"{u}:{b}" for u, b in k)
                parts.append(f"{_fmt(c)} * [{body}] w{s}")
        return _join(parts) or "0 * [] w(0,0)"


def multiply(a: AlgebraElement, b: AlgebraElement) -> AlgebraElement:
    """f w_s g w_t = f R_s(g) w_{s+t}."""
    return AlgebraElement.build([(s + t, f * r_shift(g, s)) for s, f in a.summands for t, g in b.summands])


def adjoint(a: AlgebraElement) -> AlgebraElement:
    """(f w_s)* = R_{-s}(conj f) w_{-s}."""
    return AlgebraElement.build([(-s, r_shift(f.conj(), -s)) for s, f in a.summands])


def sigma_ibeta(a: AlgebraElement, pot: Potential) -> AlgebraElement:
    """Scale the w_s summand by e^{-beta c(s)}."""
    return AlgebraElement.build([(s, f.scale(pot.boltzmann(c_value(s, pot)))) for s, f in a.summands])


# pointwise groupoid oracle

FULL = "FULL"  # the hereditary set Z^2


def contains(A, u: GroupElement) -> bool:
    return True if A == FULL else in_hereditary_set(A, u)


def translate(A, u: GroupElement):
    return FULL if A == FULL else act(A, u)


@dataclass(frozen=True)
class GroupoidFunction:
    """F(A, u) on arrows A -> A + u (which exist iff -u in A); ``support`` lists the u used."""

    fn: object
    support: frozenset

    def __call__(self, A, u: GroupElement):
        if u not in self.support or not contains(A, -u):
            return 0
        return self.fn(A, u)


def as_function(a: AlgebraElement) -> GroupoidFunction:
    """F(A, u) = f_{-u}(A) [-u in A]."""
    comps = dict(a.summands)
    return GroupoidFunction(lambda A, u: comps[-u](A), frozenset(-s for s in comps))


def convolve(F: GroupoidFunction, H: GroupoidFunction) -> GroupoidFunction:
    def fn(A, u):
        return sum((F(A, a) * H(translate(A, a), u - a) for a in F.support if contains(A, -a)), 0)
    return GroupoidFunction(fn, frozenset(a + b for a in F.support for b in H.support))


def involution(F: GroupoidFunction) -> GroupoidFunction:
    def fn(A, u):
        value = F(translate(A, u), -u)
        return value.conjugate() if hasattr(value, "conjugate") else value
    return GroupoidFunction(fn, frozenset(-u for u in F.support))


def random_unit_point(rng: np.random.Generator, full_prob: float = 0.1):
    """A random point of the closed unit space: (x, t), t >= 0, or the full set."""
    if rng.random() < full_prob:
        return FULL

    def word(lo, hi):
        return tuple(int(b) for b in rng.integers(0, 2, size=int(rng.integers(lo, hi))))

    core = word(0, 10)
    x = BiSeq.from_tails(word(1, 4), word(1, 4), core, -int(rng.integers(0, len(core) + 1)))
    return OmegaZPoint(x, int(rng.integers(0, 4)))


def pointwise_gap(F: GroupoidFunction, H: GroupoidFunction, points) -> float:
    """max |F - H| over the given unit points and the union of supports."""
    worst = 0.0
    for A in points:
        for u in F.support | H.support:
            worst = max(worst, abs(complex(F(A, u)) - complex(H(A, u))))
    return worst


# random elements

COEFFICIENTS = (1, -1, 1j, -1j, Fraction(1, 2), Fraction(-1, 2))


def random_function(rng: np.random.Generator, window: int = 4, max_terms: int = 2,
                    max_constraints: int = 3) -> CylinderFunction:
    pairs = []
    for _ in range(int(rng.integers(1, max_terms + 1))):
        k = int(rng.integers(0, max_constraints + 1))
        cons = tuple((GroupElement(int(rng.integers(-window, window + 1)), int(rng.integers(-window, window + 1))),
                      int(rng.integers(0, 2))) for _ in range(k))
        if len({u for u, _ in cons}) < len(cons):
            continue
        pairs.append((cons, COEFFICIENTS[int(rng.integers(len(COEFFICIENTS)))]))
    return CylinderFunction.build(pairs)


def random_element(rng: np.random.Generator, bias=(), window: int = 4, max_summands: int = 2,
                   shift_window: int = 2) -> AlgebraElement:
    """At most ``max_summands`` summands f w_s; s drawn from ``bias`` half of the time."""
    pairs = []
    for _ in range(int(rng.integers(1, max_summands + 1))):
        if bias and rng.random() < 0.5:
            s = bias[int(rng.integers(len(bias)))]
        else:
            s = GroupElement(int(rng.integers(-shift_window, shift_window + 1)),
                             int(rng.integers(-shift_window, shift_window + 1)))
        pairs.append((s, random_function(rng, window)))
    return AlgebraElement.build(pairs)


# states

def _word_threshold(word, lo: int, m: int) -> int:
    """P_m with a_m = t + P_m: -ones[0, m) for m > 0, +ones[m, 0) for m < 0."""
    if m > 0:
        return -sum(word[-lo:m - lo])
    if m < 0:
        return sum(word[m - lo:-lo])
    return 0


def level_integral(f: CylinderFunction, mbar: Lifted):
    """int f d(mbar) over Omega x N, exactly up to the measure's certified tail.

    For a word on the relevant window each constraint [n <= a_m] becomes a
    bound on t, so the level sum is (1-q) sum_{lo <= t < hi} q^t = q^lo - q^hi.
    """
    q = mbar.q
    if not q < 1:
        raise UncertifiedTail(f"level ratio {q} >= 1: the level sum does not close")
    total = 0
    for k, coeff in f.terms:
        coords = [(to_v_coords(u), b) for u, b in k]
        ms = [m for (m, _), _ in coords]
        lo_w, hi_w = min(ms + [0]), max(ms + [0])
        dist = mbar.inner.window_distribution(lo_w, hi_w) if hi_w > lo_w else {(): mbar.inner.mass(Cylinder())}
        term = 0
        for word, w in dist.items():
            lo, hi = 0, None
            for (m, n), b in coords:
                bound = n - _word_threshold(word, lo_w, m)  # u in A iff t >= bound
                if b:
                    lo = max(lo, bound)
                else:
                    hi = bound if hi is None else min(hi, bound)
            if hi is not None and hi <= lo:
                continue
            term += w * (q**lo - (0 if hi is None else q**hi))
        total += coeff * term
    return total


def level_integral_bruteforce(f: CylinderFunction, mbar: Lifted, levels: int = 200):
    """Independent route for atomic orbits: sum over atoms and levels of f(A(x, t))."""
    inner = mbar.inner
    if not isinstance(inner, AtomicOrbit):
        raise VariantMismatch("brute-force integral needs an atomic orbit")
    from .symbolic import shift
    total = 0
    for n, w in inner.weights:
        x = shift(inner.base, n)
        for t in range(levels):
            value = f(OmegaZPoint(x, t))
            if value != 0:
                total += w * mbar.slice_mass(t) * value
    return total


@dataclass(frozen=True)
class CondExp:
    """omega(a) = int E(a) d(mbar) with E keeping the w_0 summand."""

    mbar: Lifted
    name: str = "condexp"

    def evaluate(self, a: AlgebraElement, pot: Potential):
        return level_integral(a.component(ZERO), self.mbar)


@dataclass(frozen=True)
class TypeI:
    """conj(chi)^k int f dm on s = k g (g the stabilizer generator), 0 off the stabilizer."""

    mbar: Lifted
    character: complex
    name: str = "type-i"

    def generator(self) -> GroupElement:
        inner = self.mbar.inner
        g = stabilizer_of(OmegaZPoint(inner.base, 0)) if isinstance(inner, AtomicOrbit) else None
        if g is None:
            raise VariantMismatch("type I states need an atomic measure on a periodic orbit")
        return g

    def validate(self, pot: Potential):
        g = self.generator()
        if c_value(g, pot) != 0:
            raise VariantMismatch(f"stabilizer generator {g} has c = {c_value(g, pot)} != 0")
        if abs(abs(complex(self.character)) - 1) > 1e-12:
            raise ValueError("character value must have modulus 1")

    def evaluate(self, a: AlgebraElement, pot: Potential):
        g = self.generator()
        total = 0
        for s, f in a.summands:
            k = _multiple_of(s, g)
            if k is None:
                continue
            total += complex(self.character).conjugate() ** k * level_integral(f, self.mbar)
        return total


def _multiple_of(s: GroupElement, g: GroupElement) -> int | None:
    if g.a != 0:
        k, r = divmod(s.a, g.a)
    else:
        k, r = divmod(s.b, g.b)
    return k if r == 0 and k * g == s else None


@dataclass(frozen=True)
class TorusMeasure:
    """Atoms plus a Haar component on T^d (d = 1 or 2); points as tuples of angles in turns."""

    atoms: tuple[tuple[tuple[float, ...], float], ...] = ()
    haar: float = 1.0

    def __post_init__(self):
        total = self.haar + sum(w for _, w in self.atoms)
        if abs(total - 1) > 1e-12 or self.haar < 0 or any(w < 0 for _, w in self.atoms):
            raise ValueError("torus measure must be a probability measure")

    def moment(self, *n: int) -> complex:
        """int z_1^{n_1} ... z_d^{n_d} d mu."""
        value = self.haar if not any(n) else 0.0
        for angles, w in self.atoms:
            value += w * np.exp(2j * np.pi * sum(k * x for k, x in zip(n, angles)))
        return complex(value)


@dataclass(frozen=True)
class ThetaZero:
    """delta_{m,0} (int z^n d mu)(1 - e^{-beta}) sum_k e^{-beta k} f(A(1, k)), A(1, k) = {a <= k}."""

    mu: TorusMeasure
    name: str = "theta-zero"

    def validate(self, pot: Potential):
        if pot.theta != 0:
            raise VariantMismatch("this state family needs theta = 0")

    def evaluate(self, a: AlgebraElement, pot: Potential):
        self.validate(pot)
        r = pot.boltzmann(1)
        total = 0
        for s, f in a.summands:
            if s.a != 0:
                continue
            integral = 0
            for k, coeff in f.terms:
                lo, hi = 0, None  # k-range where every constraint holds
                for u, b in k:
                    if b:
                        lo = max(lo, u.a)
                    else:
                        hi = u.a if hi is None else min(hi, u.a)
                if hi is not None and hi <= lo:
                    continue
                integral += coeff * (r**lo - (0 if hi is None else r**hi))
            total += self.mu.moment(s.b) * integral
        return total


@dataclass(frozen=True)
class Tracial:
    """f(G) times the Fourier coefficient of mu2 at s."""

    mu2: TorusMeasure
    name: str = "tracial"

    def evaluate(self, a: AlgebraElement, pot: Potential):
        return sum((f(FULL) * self.mu2.moment(s.a, s.b) for s, f in a.summands), 0)


def evaluate_state(st, a: AlgebraElement, pot: Potential, tol=1e-12) -> complex:
    """omega(a); measure-backed states refuse when their truncation certificate exceeds tol."""
    mbar = getattr(st, "mbar", None)
    if mbar is not None and mbar.certified_tail > tol:
        raise UncertifiedTail(f"orbit truncation bound {mbar.certified_tail} exceeds tol {tol}")
    return complex(st.evaluate(a, pot))


@dataclass
class KmsReport:
    state: str
    trials: int
    tol: float
    max_deviation: float = 0.0
    worst_pair: tuple = ()
    failures: int = 0
    positivity_min: float = float("inf")
    hermitian_gap: float = 0.0  # max |Im omega(a* a)|
    normalization: float = float("nan")

    @property
    def passed(self) -> bool:
        return (self.failures == 0 and self.positivity_min >= -self.tol
                and self.hermitian_gap <= self.tol and abs(self.normalization - 1) <= self.tol)

    def to_json(self) -> dict:
        return {"state": self.state, "trials": self.trials, "tol": self.tol,
                "max_deviation": self.max_deviation, "failures": self.failures,
                "worst_pair": [str(x) for x in self.worst_pair],
                "positivity_min": self.positivity_min, "hermitian_gap": self.hermitian_gap,
                "normalization": self.normalization,
                "passed": self.passed}


def state_bias(st, pot: Potential) -> list[GroupElement]:
    """Shifts that make products land where the state is nonzero."""
    if isinstance(st, TypeI):
        g = st.generator()
        return [g, -g, 2 * g, ZERO]
    if isinstance(st, ThetaZero):
        return [GroupElement(0, 1), GroupElement(0, -1), ZERO]
    return [ZERO]


def verify_kms(st, pot: Potential, trials: int = 200, seed: int = 0, tol: float = 1e-9) -> KmsReport:
    """|omega(ab) - omega(b sigma_{i beta}(a))| <= tol on random pairs; traces check omega(ab) = omega(ba)."""
    if hasattr(st, "validate"):
        st.validate(pot)
    rng = np.random.default_rng(seed)
    report = KmsReport(st.name, trials, tol)
    bias = state_bias(st, pot)
    tracial = isinstance(st, Tracial)
    for _ in range(trials):
        a = random_element(rng, bias)
        b = random_element(rng, bias + [-s for s, _ in a.summands])
        lhs = evaluate_state(st, a * b, pot)
        rhs = evaluate_state(st, b * a if tracial else b * sigma_ibeta(a, pot), pot)
        dev = abs(lhs - rhs)
        if dev > report.max_deviation:
            report.max_deviation, report.worst_pair = dev, (a, b)
        report.failures += dev > tol
        pos = evaluate_state(st, adjoint(a) * a, pot)
        report.positivity_min = min(report.positivity_min, pos.real)
        report.hermitian_gap = max(report.hermitian_gap, abs(pos.imag))
    report.normalization = abs(evaluate_state(st, AlgebraElement.identity(), pot))
    return report


# text syntax: coeff * [(a,b):bit, ...] w(a,b) + ...

_TERM = re.compile(
    r"\s*(?P<sign>[+-])?\s*(?:(?P<coeff>\([^()]*\)|[0-9.ij/]+)\s*\*\s*)?"
    r"(?:\[(?P<cons>[^\]]*)\]\s*)?w\s*\(\s*(?P<a>-?\d+)\s*,\s*(?P<b>-?\d+)\s*\)\s*")
_CONS = re.compile(r"\s*\(\s*(-?\d+)\s*,\s*(-?\d+)\s*\)\s*:\s*([01])\s*")


def _parse_coeff(text: str | None):
    if text is None:
        return 1
    text = text.strip()
    if text.startswith("("):
        text = text[1:-1]
    text = text.replace(" ", "").replace("i", "j")
    if "j" in text:
        return complex(text)
    return Fraction(text)


def _fmt(c) -> str:
    if isinstance(c, Fraction):
        return str(c) if c.denominator == 1 else f"({c})"
    c = complex(c)
    if c.imag == 0:
        return repr(c.real)
    return f"({c.real!r}{c.imag:+}j)" if c.real else f"({c.imag!r}j)"


def parse_element(text: str) -> AlgebraElement:
    pos, pairs = 0, []
    text = text.strip()
    while pos < len(text):
        match = _TERM.match(text, pos)
        if match is None or match.end() == pos:
            raise ValueError(f"cannot parse algebra element near {text[pos:]!r}")
        if pairs and match.group("sign") is None:
            raise ValueError("terms must be joined with + or -")
        coeff = _parse_coeff(match.group("coeff"))
        if match.group("sign") == "-":
            coeff = -coeff
        cons = []
        body = (match.group("cons") or "").strip()
        if body:
            for item in re.split(r",(?![^()]*\))", body):
                m = _CONS.fullmatch(item)
                if m is None:
                    raise ValueError(f"bad constraint {item!r}")
                cons.append((GroupElement(int(m.group(1)), int(m.group(2))), int(m.group(3))))
        s = GroupElement(int(match.group("a")), int(match.group("b")))
        pairs.append((s, CylinderFunction.build([(tuple(cons), coeff)])))
        pos = match.end()
    return AlgebraElement.build(pairs)
