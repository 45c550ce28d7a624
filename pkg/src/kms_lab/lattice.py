"""The group Z^2, the homomorphism c, the v-basis and the SL2(Z) transport."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import TracialRegime
from .reals import DEFAULT_PRECISION, as_real, context, is_exact, parse_real, to_mpf


@dataclass(frozen=True, order=True)
class GroupElement:
    """a*e1 + b*e2 with e1 = (1, 0), e2 = (0, 1)."""

    a: int
    b: int

    def __add__(self, other: "GroupElement") -> "GroupElement":
        return GroupElement(self.a + other.a, self.b + other.b)

    def __sub__(self, other: "GroupElement") -> "GroupElement":
        return GroupElement(self.a - other.a, self.b - other.b)

    def __neg__(self) -> "GroupElement":
        return GroupElement(-self.a, -self.b)

    def __rmul__(self, k: int) -> "GroupElement":
        return GroupElement(k * self.a, k * self.b)

    def in_cone(self) -> bool:
        """Membership in N^2."""
        return self.a >= 0 and self.b >= 0

    def __str__(self) -> str:
        return f"({self.a},{self.b})"

    @classmethod
    def parse(cls, text: str) -> "GroupElement":
        body = text.strip().strip("()")
        a, b = (int(part) for part in body.split(","))
        return cls(a, b)


ZERO = GroupElement(0, 0)
E1 = GroupElement(1, 0)
E2 = GroupElement(0, 1)
V1 = E1
V2 = GroupElement(1, 1)


def to_v_coords(s: GroupElement) -> tuple[int, int]:
    """(m, n) with s = m*v1 + n*v2."""
    return s.a - s.b, s.b


def from_v_coords(m: int, n: int) -> GroupElement:
    return GroupElement(m + n, n)


@dataclass(frozen=True)
class Potential:
    """Inverse temperature beta and theta = c(e2), with c(e1) = 1."""

    beta: object
    theta: object
    precision: int = DEFAULT_PRECISION
    theta_form: str | None = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "beta", as_real(self.beta, self.precision))
        object.__setattr__(self, "theta", as_real(self.theta, self.precision))

    @classmethod
    def parse(cls, beta: str, theta: str, precision: int = DEFAULT_PRECISION) -> "Potential":
        return cls(parse_real(beta, precision), parse_real(theta, precision), precision, theta_form=theta)

    @property
    def ctx(self):
        return context(self.precision)

    @property
    def exact(self) -> bool:
        return is_exact(self.theta)

    def mp(self, value):
        return to_mpf(value, self.precision)

    def exp(self, value):
        return self.ctx.exp(self.mp(value))

    def boltzmann(self, energy):
        """e^{-beta * energy} at working precision."""
        return self.ctx.exp(-self.mp(self.beta) * self.mp(energy))

    @property
    def level_ratio(self):
        """q = e^{-beta(1+theta)}, the weight ratio between consecutive levels."""
        return self.boltzmann(1 + self.theta)

    def eps(self):
        return self.ctx.mpf(2) ** (-self.precision + 8)


def c_value(s: GroupElement, pot: Potential):
    """c(s) = a + b*theta, exact when theta is rational."""
    return s.a + s.b * pot.theta


def existence_gate(pot: Potential) -> bool:
    """True iff conformal measures (equivalently beta-KMS states) exist: beta > 0 and theta >= 0."""
    if pot.beta == 0:
        raise TracialRegime("beta = 0 is the tracial regime")
    return pot.beta > 0 and pot.theta >= 0


@dataclass(frozen=True)
class TransportMatrix:
    """The matrix [[x, y], [z, w]] of phi: phi(e1) = x e1 + z e2, phi(e2) = y e1 + w e2."""

    x: int
    y: int
    z: int
    w: int
    p: int
    q: int

    def __post_init__(self):
        if min(self.x, self.y, self.z, self.w) < 0:
            raise ValueError("transport matrix entries must be nonnegative")
        if self.det != 1:
            raise ValueError("transport matrix must have determinant 1")
        if self.x + self.z != self.q or self.y + self.w != self.p:
            raise ValueError("column sums must be (q, p)")

    @property
    def det(self) -> int:
        return self.x * self.w - self.y * self.z

    @property
    def rows(self) -> tuple[tuple[int, int], tuple[int, int]]:
        return (self.x, self.y), (self.z, self.w)

    def apply(self, s: GroupElement) -> GroupElement:
        return GroupElement(self.x * s.a + self.y * s.b, self.z * s.a + self.w * s.b)

    def apply_inverse(self, s: GroupElement) -> GroupElement:
        return GroupElement(self.w * s.a - self.y * s.b, -self.z * s.a + self.x * s.b)


def sl2_transport(p: int, q: int) -> TransportMatrix:
    """Matrix carrying c_theta (theta = p/q) to q^{-1} times the theta = 1 homomorphism."""
    if p <= 0 or q <= 0:
        raise ValueError("p and q must be positive")
    if math.gcd(p, q) != 1:
        raise ValueError(f"p={p} and q={q} are not coprime")
    if q == 1:
        return TransportMatrix(1, p - 1, 0, 1, p, q)
    x = pow(p, -1, q)  # least positive solution of x p = 1 mod q
    y = (x * p - 1) // q
    return TransportMatrix(x, y, q - x, p - y, p, q)


def transported_c(M: TransportMatrix, s: GroupElement, pot: Potential | None = None) -> int:
    """c_1(phi(s)) with c_1 the theta = 1 homomorphism; equals q * c_theta(s)."""
    if pot is not None and pot.theta != Fraction(M.p, M.q):
        raise ValueError("potential theta does not match the transport matrix")
    image = M.apply(s)
    return image.a + image.b
