"""Real parameters: exact rationals where possible, mpmath values otherwise.

Parameters are parsed from text (``3/2``, ``0.7``, ``sqrt(2)-1``, ``pi``,
``cf:1,2,...``).  Rational inputs become :class:`fractions.Fraction`; all
other inputs become ``mpf`` values of a per-precision mpmath context.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from numbers import Rational

import mpmath
import sympy

DEFAULT_PRECISION = 128


@lru_cache(maxsize=None)
def context(precision: int = DEFAULT_PRECISION) -> mpmath.ctx_mp.MPContext:
    """Shared mpmath context with the given significand precision (bits)."""
    if precision < 16:
        raise ValueError("precision must be at least 16 bits")
    ctx = mpmath.MPContext()
    ctx.prec = precision
    return ctx


def is_exact(value) -> bool:
    return isinstance(value, (int, Fraction))


def as_real(value, precision: int = DEFAULT_PRECISION):
    """Coerce ``value`` into the dual representation (Fraction or mpf)."""
    if isinstance(value, bool):
        raise TypeError("booleans are not real parameters")
    if isinstance(value, Rational):
        return Fraction(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ValueError(f"non-finite parameter {value!r}")
        return Fraction(repr(value))
    if isinstance(value, str):
        return parse_real(value, precision)
    if isinstance(value, sympy.Basic):
        return _from_sympy(value, precision)
    ctx = context(precision)
    return ctx.mpf(value)


def to_mpf(value, precision: int = DEFAULT_PRECISION):
    ctx = context(precision)
    if isinstance(value, Fraction):
        return ctx.mpf(value.numerator) / value.denominator
    return ctx.mpf(value)


def to_float(value) -> float:
    if isinstance(value, Fraction):
        return float(value)
    return float(value)


def to_sympy(value) -> sympy.Expr:
    if isinstance(value, Fraction):
        return sympy.Rational(value.numerator, value.denominator)
    return sympy.Float(mpmath.nstr(value, 40), 40)


_DECIMAL = re.compile(r"^[+-]?(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?$")
_RATIO = re.compile(r"^[+-]?\d+\s*/\s*\d+$")


@dataclass(frozen=True)
class ContinuedFraction:
    """[0; pre..., period, period, ...] with a purely periodic tail."""

    preperiod: tuple[int, ...]
    period: tuple[int, ...]

    def __post_init__(self):
        if not self.period:
            raise ValueError("continued fraction needs a nonempty period")
        if any(a <= 0 for a in self.preperiod + self.period):
            raise ValueError("partial quotients must be positive integers")

    @classmethod
    def parse(cls, text: str) -> "ContinuedFraction":
        body = text.strip()
        if body.startswith("cf:"):
            body = body[3:]
        body = body.replace(" ", "")
        if not body.endswith("..."):
            raise ValueError("continued fraction must end with '...' (periodic repeat)")
        body = body[:-3].rstrip(",")
        pre: tuple[int, ...] = ()
        if ";" in body:
            head, body = body.split(";", 1)
            pre = tuple(int(a) for a in head.split(",") if a)
        period = tuple(int(a) for a in body.split(",") if a)
        return cls(pre, period)

    def coefficients(self, count: int) -> list[int]:
        out = list(self.preperiod[:count])
        while len(out) < count:
            out.extend(self.period)
        return out[:count]

    def symbolic(self) -> sympy.Expr:
        """Exact quadratic surd in (0, 1)."""
        # y = [a1; a2, ..., ak, y] for the periodic block
        p_prev, p = 1, self.period[0]
        q_prev, q = 0, 1
        for a in self.period[1:]:
            p_prev, p = p, a * p + p_prev
            q_prev, q = q, a * q + q_prev
        # y = (p y + p_prev) / (q y + q_prev)
        disc = (q_prev - p) ** 2 + 4 * q * p_prev
        y = (p - q_prev + sympy.sqrt(disc)) / (2 * q)
        for a in reversed(self.preperiod):
            y = a + 1 / y
        return sympy.nsimplify(sympy.radsimp(1 / y))

    def __str__(self) -> str:
        pre = ",".join(map(str, self.preperiod))
        per = ",".join(map(str, self.period))
        return f"cf:{pre + ';' if pre else ''}{per},..."


def bounded_partial_quotients(cf, bound: int) -> bool:
    """True iff every supplied coefficient is a positive integer at most ``bound``."""
    coeffs = list(cf.preperiod + cf.period) if isinstance(cf, ContinuedFraction) else list(cf)
    return all(isinstance(a, int) and 0 < a <= bound for a in coeffs)


def symbolic(text: str) -> sympy.Expr | None:
    """Exact symbolic form of a parameter string, or None for plain decimals."""
    text = text.strip()
    if text.startswith("cf:"):
        return ContinuedFraction.parse(text).symbolic()
    if _DECIMAL.match(text) or _RATIO.match(text):
        return sympy.Rational(Fraction(text.replace(" ", "")))
    try:
        return sympy.sympify(text, rational=True)
    except (sympy.SympifyError, TypeError, SyntaxError) as exc:
        raise ValueError(f"cannot parse real parameter {text!r}") from exc


def parse_real(text: str, precision: int = DEFAULT_PRECISION):
    text = text.strip()
    if _DECIMAL.match(text) or _RATIO.match(text):
        return Fraction(text.replace(" ", ""))
    return _from_sympy(symbolic(text), precision)


def _from_sympy(expr: sympy.Expr, precision: int):
    expr = sympy.nsimplify(expr) if expr.is_Float else expr
    if expr.is_rational:
        r = sympy.Rational(expr)
        return Fraction(int(r.p), int(r.q))
    if not expr.is_real:
        raise ValueError(f"parameter {expr} is not real")
    digits = int(precision * 0.30103) + 10
    ctx = context(precision)
    return ctx.mpf(str(sympy.N(expr, digits)))


def rationally_independent(*exprs) -> bool | None:
    """Exact check that 1 and the given numbers are linearly independent over Q.

    Works for sums of rational multiples of distinct radicals or transcendental
    atoms.  Returns None when the symbolic form is unavailable or not
    decidable this way.
    """
    vectors = []
    basis: dict = {}
    for e in exprs:
        if e is None:
            return None
        e = sympy.expand(sympy.radsimp(sympy.sympify(e)))
        coeffs = {}
        for term, coeff in e.as_coefficients_dict().items():
            if not coeff.is_Rational:
                return None
            if term == 1:
                key = 1
            elif term.is_Pow and term.exp == sympy.Rational(1, 2) and term.base.is_Integer:
                key = term
            elif term in (sympy.pi, sympy.E):
                key = term
            else:
                return None
            coeffs[key] = coeffs.get(key, 0) + coeff
        for key in coeffs:
            basis.setdefault(key, len(basis))
        vectors.append(coeffs)
    basis.setdefault(1, len(basis))
    rows = [[1 if k == 1 else 0 for k in basis]]
    for coeffs in vectors:
        rows.append([coeffs.get(k, 0) for k in basis])
    return sympy.Matrix(rows).rank() == len(rows)


def is_quadratic_irrational(expr) -> bool:
    """Exact: a real root of an irreducible rational quadratic."""
    if not (expr.is_real and expr.is_algebraic) or expr.is_rational:
        return False
    x = sympy.Symbol("x")
    return sympy.degree(sympy.minimal_polynomial(expr, x), x) == 2


def in_q_plus_q_alpha(value, alpha) -> bool | None:
    """Exact test of ``value`` in Q + Q*alpha for irrational symbolic alpha (None if undecidable)."""
    indep = rationally_independent(alpha, value)
    return None if indep is None else not indep


def continued_fraction(value, terms: int, precision: int = DEFAULT_PRECISION) -> list[int]:
    """First partial quotients a0; a1, a2, ... of a positive real."""
    ctx = context(precision)
    x = to_mpf(value, precision)
    out = []
    for _ in range(terms):
        a = int(ctx.floor(x))
        out.append(a)
        frac = x - a
        if frac == 0:
            break
        x = 1 / frac
    return out


def convergents(coeffs: list[int]) -> list[tuple[int, int]]:
    """(p_k, q_k) for a0; a1, ... ."""
    out = []
    p_prev, p = 1, coeffs[0]
    q_prev, q = 0, 1
    out.append((p, q))
    for a in coeffs[1:]:
        p_prev, p = p, a * p + p_prev
        q_prev, q = q, a * q + q_prev
        out.append((p, q))
    return out
