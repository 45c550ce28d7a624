"""Finitely described points of {0,1}^Z and the parametrization of the universal space.

A :class:`BiSeq` is a bi-infinite binary sequence with an eventually periodic
left tail, a finite core on ``[start, stop)`` and an eventually periodic right
tail.  :class:`OmegaZPoint` is a pair ``(x, t)``; it encodes the hereditary set
``A(x, t) = {m v1 + n v2 : n <= a_m}`` with profile ``a_m``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field

from .lattice import GroupElement, Potential, from_v_coords, to_v_coords

Word = tuple[int, ...]


def _min_period(word: Word) -> int:
    n = len(word)
    for d in range(1, n + 1):
        if n % d == 0 and all(word[i] == word[(i + d) % n] for i in range(n)):
            return d
    return n


def _cumulative(word: Word) -> tuple[int, ...]:
    out = [0]
    for bit in word:
        out.append(out[-1] + bit)
    return tuple(out)


def _cyclic_ones(cum: tuple[int, ...], offset: int, count: int) -> int:
    """Ones in ``count`` consecutive cyclic positions starting at ``offset``."""
    period = len(cum) - 1
    full, rem = divmod(count, period)
    total = full * cum[period]
    end = offset + rem
    if end <= period:
        total += cum[end] - cum[offset]
    else:
        total += cum[period] - cum[offset] + cum[end - period]
    return total


def _check_word(word, name: str) -> Word:
    word = tuple(int(b) for b in word)
    if any(b not in (0, 1) for b in word):
        raise ValueError(f"{name} must be a binary word")
    return word


@dataclass(frozen=True)
class BiSeq:
    """Bi-infinite binary sequence ``(left)* core (right)*`` with core on ``[start, start+len(core))``.

    For ``k < start`` the bit is ``left[(k - start) % len(left)]``, so the last
    letter of ``left`` sits at ``start - 1``.  For ``k >= stop`` the bit is
    ``right[(k - stop) % len(right)]``.  Instances are kept in canonical form
    (primitive tail periods, core absorbed into the tails as far as possible),
    so dataclass equality is equality of sequences.
    """

    left: Word
    core: Word
    start: int
    right: Word
    _lcum: tuple = field(init=False, repr=False, compare=False)
    _ccum: tuple = field(init=False, repr=False, compare=False)
    _rcum: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        left = _check_word(self.left, "left period")
        right = _check_word(self.right, "right period")
        core = list(_check_word(self.core, "core"))
        if not left or not right:
            raise ValueError("tail periods must be nonempty")
        start = int(self.start)
        stop = start + len(core)
        if start > 0 or stop < 0:
            raise ValueError("core window must contain position 0 boundary (start <= 0 <= stop)")
        d = _min_period(left)
        left = left[len(left) - d:]
        d = _min_period(right)
        right = right[:d]
        while stop > max(start, 0) and core[-1] == right[-1]:
            core.pop()
            right = right[-1:] + right[:-1]
            stop -= 1
        while start < 0 and core and core[0] == left[0]:
            core.pop(0)
            left = left[1:] + left[:1]
            start += 1
        object.__setattr__(self, "left", left)
        object.__setattr__(self, "right", right)
        object.__setattr__(self, "core", tuple(core))
        object.__setattr__(self, "start", start)
        object.__setattr__(self, "_lcum", _cumulative(left))
        object.__setattr__(self, "_ccum", _cumulative(tuple(core)))
        object.__setattr__(self, "_rcum", _cumulative(right))

    @property
    def stop(self) -> int:
        return self.start + len(self.core)

    def bit(self, k: int) -> int:
        if k < self.start:
            return self.left[(k - self.start) % len(self.left)]
        if k >= self.stop:
            return self.right[(k - self.stop) % len(self.right)]
        return self.core[k - self.start]

    def word(self, lo: int, hi: int) -> Word:
        return tuple(self.bit(k) for k in range(lo, hi))

    def ones(self, lo: int, hi: int) -> int:
        """Number of ones among positions lo, ..., hi-1 (O(1) after construction)."""
        if hi <= lo:
            return 0
        l, r = self.start, self.stop
        total = 0
        a, b = lo, min(hi, l)
        if b > a:
            total += _cyclic_ones(self._lcum, (a - l) % len(self.left), b - a)
        a, b = max(lo, l), min(hi, r)
        if b > a:
            total += self._ccum[b - l] - self._ccum[a - l]
        a, b = max(lo, r), hi
        if b > a:
            total += _cyclic_ones(self._rcum, (a - r) % len(self.right), b - a)
        return total

    @property
    def description_length(self) -> int:
        return len(self.left) + len(self.core) + len(self.right)

    # constructors

    @classmethod
    def constant(cls, bit: int) -> "BiSeq":
        return cls((bit,), (), 0, (bit,))

    @classmethod
    def periodic(cls, word) -> "BiSeq":
        """The sequence with bit(k) = word[k mod len(word)]."""
        word = _check_word(word, "word")
        return cls(word, (), 0, word)

    @classmethod
    def from_tails(cls, left, right, core=(), start: int | None = None) -> "BiSeq":
        core = tuple(core)
        if start is None:
            start = 0
        return cls(tuple(left), core, start, tuple(right))

    @classmethod
    def parse(cls, text: str) -> "BiSeq":
        """Parse ``"(w_left)* core . core (w_right)*"``; ``.`` marks position 0."""
        compact = re.sub(r"\s+", "", text)
        match = re.fullmatch(r"\(([01]+)\)\*([01]*)\.([01]*)\(([01]+)\)\*", compact)
        if not match:
            raise ValueError(f"cannot parse bi-infinite sequence {text!r}")
        left, before, after, right = match.groups()
        core = tuple(int(c) for c in before + after)
        return cls(tuple(int(c) for c in left), core, -len(before), tuple(int(c) for c in right))

    def __str__(self) -> str:
        left = "".join(map(str, self.left))
        right = "".join(map(str, self.right))
        before = "".join(str(self.bit(k)) for k in range(self.start, 0))
        after = "".join(str(self.bit(k)) for k in range(0, self.stop))
        return f"({left})* {before} . {after} ({right})*".replace("  ", " ")


def shift(x: BiSeq, k: int) -> BiSeq:
    """tau^k x, where tau(x)_j = x_{j-1}."""
    if k == 0:
        return x
    start = min(x.start + k, 0)
    stop = max(x.stop + k, 0)
    core = tuple(x.bit(j - k) for j in range(start, stop))
    L, R = len(x.left), len(x.right)
    left = tuple(x.bit(start - L + i - k) for i in range(L))
    right = tuple(x.bit(stop + i - k) for i in range(R))
    return BiSeq(left, core, start, right)


def chi(x: BiSeq, pot: Potential):
    """The potential: 1 if x_{-1} = 0, else -theta."""
    return 1 if x.bit(-1) == 0 else -pot.theta


def birkhoff(x: BiSeq, n: int, pot: Potential):
    """S_n(chi)(x), with S_{m+n}(x) = S_n(x) + S_m(tau^n x)."""
    if n > 0:
        return n - (1 + pot.theta) * x.ones(-n, 0)
    if n < 0:
        return n + (1 + pot.theta) * x.ones(0, -n)
    return 0


def is_periodic(x: BiSeq) -> int | None:
    """Minimal p >= 1 with tau^p x = x, or None."""
    L, R = len(x.left), len(x.right)
    if L != R:
        return None
    # the two tails must be the same periodic sequence extended across the core
    p = L
    lo, hi = x.start - p, x.stop + p
    if all(x.bit(k) == x.bit(k + p) for k in range(lo, hi)):
        return _min_period(x.word(0, p))
    return None


@dataclass(frozen=True)
class OmegaZPoint:
    """(x, t) in Omega x Z; encodes the hereditary set A(x, t)."""

    x: BiSeq
    t: int

    def __str__(self) -> str:
        return f"[{self.x}, t={self.t}]"


def profile(pt: OmegaZPoint, m: int) -> int:
    """a_m = t - (x_0 + ... + x_{m-1}) for m > 0, t + (x_m + ... + x_{-1}) for m < 0."""
    if m > 0:
        return pt.t - pt.x.ones(0, m)
    if m < 0:
        return pt.t + pt.x.ones(m, 0)
    return pt.t


def in_hereditary_set(pt: OmegaZPoint, s: GroupElement) -> bool:
    m, n = to_v_coords(s)
    return n <= profile(pt, m)


def level_after(pt: OmegaZPoint, s: GroupElement) -> int:
    """t-component of pt + s without shifting the sequence."""
    m, n = to_v_coords(s)
    if m > 0:
        return pt.t + pt.x.ones(-m, 0) + n
    if m < 0:
        return pt.t - pt.x.ones(0, -m) + n
    return pt.t + n


def act(pt: OmegaZPoint, s: GroupElement) -> OmegaZPoint:
    """pt + s, with (x,t) + v1 = (tau x, t + x_{-1}) and (x,t) + v2 = (x, t+1)."""
    m, _ = to_v_coords(s)
    return OmegaZPoint(shift(pt.x, m), level_after(pt, s))


def _window(window: int):
    for a in range(-window, window + 1):
        for b in range(-window, window + 1):
            yield GroupElement(a, b)


def equivariance_check(pt: OmegaZPoint, s: GroupElement, window: int = 8) -> bool:
    """A(pt + s) = A(pt) + s on the square window."""
    moved = act(pt, s)
    return all(in_hereditary_set(moved, u) == in_hereditary_set(pt, u - s) for u in _window(window))


def stabilizer_of(pt: OmegaZPoint) -> GroupElement | None:
    """Generator p v1 - K v2 of the stabilizer for x of minimal period p with K ones per period."""
    p = is_periodic(pt.x)
    if p is None:
        return None
    return from_v_coords(p, -pt.x.ones(0, p))


def q_set(pt: OmegaZPoint, window: int = 8) -> set[GroupElement]:
    """{s : pt - s in Omega x N} within the square window."""
    return {s for s in _window(window) if level_after(pt, -s) >= 0}
