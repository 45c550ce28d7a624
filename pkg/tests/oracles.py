"""Independent reference implementations for derived values.

Everything here works from definitions by direct loops over explicit bits and
shares no code with kms_lab, so agreement is evidence rather than tautology.
"""
from __future__ import annotations

import math
from fractions import Fraction


class Bits:
    """Bi-infinite sequence given by a function k -> bit (no canonical form)."""

    def __init__(self, fn):
        self.fn = fn

    def __call__(self, k: int) -> int:
        return self.fn(k)

    @classmethod
    def from_text(cls, text: str) -> "Bits":
        """Same '(L)* core . core (R)*' notation, expanded naively."""
        compact = text.replace(" ", "")
        left_end = compact.index(")*")
        left = compact[1:left_end]
        rest = compact[left_end + 2:]
        right_start = rest.rindex("(")
        right = rest[right_start + 1:-2]
        middle = rest[:right_start]
        before, after = middle.split(".")
        core = before + after
        lo = -len(before)

        def fn(k):
            if k < lo:
                return int(left[(k - lo) % len(left)])
            if k >= lo + len(core):
                return int(right[(k - lo - len(core)) % len(right)])
            return int(core[k - lo])
        return cls(fn)

    def shifted(self, k: int) -> "Bits":
        return Bits(lambda j: self.fn(j - k))


def chi_direct(x: Bits, theta):
    return 1 if x(-1) == 0 else -theta


def birkhoff_direct(x: Bits, n: int, theta):
    """S_n chi(x) by summing chi along the orbit one step at a time."""
    total = 0
    if n >= 0:
        for k in range(n):
            total += chi_direct(x.shifted(k), theta)
    else:
        for k in range(n, 0):
            total -= chi_direct(x.shifted(k), theta)
    return total


def profile_direct(x: Bits, t: int, m: int) -> int:
    if m >= 0:
        return t - sum(x(j) for j in range(m))
    return t + sum(x(j) for j in range(m, 0))


def hereditary_direct(x: Bits, t: int, a: int, b: int) -> bool:
    # solve a e1 + b e2 = m v1 + n v2 with v1 = (1, 0), v2 = (1, 1)
    n = b
    m = a - n
    return n <= profile_direct(x, t, m)


def act_direct(x: Bits, t: int, a: int, b: int):
    """Apply m copies of +v1 (or its inverse) then n copies of +v2, step by step."""
    n = b
    m = a - n
    for _ in range(m):
        t, x = t + x(-1), x.shifted(1)
    for _ in range(-m):
        x = x.shifted(-1)
        t = t - x(-1)
    return x, t + n


def orbit_weight_direct(x: Bits, n0: int, beta: float, theta: float, span: int = 400) -> float:
    """w_{n0} = e^{-beta S_{n0}} / sum_{|n| <= span} e^{-beta S_n}, summed term by term."""
    terms = {}
    s = 0.0
    terms[0] = 1.0
    for n in range(1, span + 1):
        s += chi_direct(x.shifted(n - 1), theta)
        terms[n] = math.exp(-beta * s)
    s = 0.0
    for n in range(-1, -span - 1, -1):
        s -= chi_direct(x.shifted(n), theta)
        terms[n] = math.exp(-beta * s)
    return terms[n0] / math.fsum(terms.values())


def odometer_direct(bits: list[int], m: int):
    """Add m to the 2-adic integer with digit list ``bits`` one unit at a time.

    Returns (new bits, sum of phi over the steps) with phi = first zero - 2.
    """
    bits = list(bits)
    total = 0
    for _ in range(m):
        j = bits.index(0)
        total += (j + 1) - 2
        for i in range(j):
            bits[i] = 0
        bits[j] = 1
    for _ in range(-m):
        j = bits.index(1)
        for i in range(j):
            bits[i] = 1
        bits[j] = 0
        total -= bits.index(0) + 1 - 2
    return bits, total


def sl2_bruteforce(p: int, q: int):
    """Least x in 1..q-1 with x p = 1 mod q, the remaining entries from the column sums."""
    if q == 1:
        return (1, p - 1, 0, 1)
    x = next(x for x in range(1, q) if (x * p) % q == 1)
    y = (x * p - 1) // q
    return (x, y, q - x, p - y)


def dyadic_mass(word, p: Fraction) -> Fraction:
    out = Fraction(1)
    for b in word:
        out *= p if b else 1 - p
    return out


def rotation2_nu(a: float, b: float, eta: float, beta: float, steps: int = 200000) -> float:
    """Midpoint-rule integral of the normalized density e^{beta 1_[0,eta)}."""
    z = eta * math.exp(beta) + 1 - eta
    h = (b - a) / steps
    return sum((math.exp(beta) if a + (i + 0.5) * h < eta else 1.0) for i in range(steps)) * h / z


def minimal_period_bruteforce(x: Bits, bound: int, window: int = 64):
    for p in range(1, bound + 1):
        if all(x(k) == x(k + p) for k in range(-window, window)):
            return p
    return None
