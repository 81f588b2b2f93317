"""Closed interval arithmetic with outward one-ulp widening.

Every operation rounds to nearest and then widens each finite bound one ulp
outward, so the result always encloses the exact real-number image.  This is
coarser than directed rounding but sound for the operation set used here
(sums, products, integer powers), and an extra ulp per node is irrelevant at
the margins the transversality checks need.
"""

from __future__ import annotations

import math
from fractions import Fraction


def _down(x):
    if x == math.inf or x == -math.inf:
        return x
    return math.nextafter(x, -math.inf)


def _up(x):
    if x == math.inf or x == -math.inf:
        return x
    return math.nextafter(x, math.inf)


class Interval:
    """A closed interval [lo, hi] of binary floats, lo <= hi."""

    __slots__ = ("lo", "hi")

    def __init__(self, lo, hi=None):
        if hi is None:
            hi = lo
        if math.isnan(lo) or math.isnan(hi):
            lo, hi = -math.inf, math.inf
        if lo > hi:
            raise ValueError(f"inverted interval [{lo}, {hi}]")
        self.lo = float(lo)
        self.hi = float(hi)

    @classmethod
    def exact(cls, x):
        return cls(float(x), float(x))

    @classmethod
    def from_decimal(cls, text):
        """Enclosure of a decimal literal, exact when representable."""
        v = Fraction(text)
        f = float(v)
        if Fraction(f) == v:
            return cls(f, f)
        if Fraction(f) < v:
            return cls(f, _up(f))
        return cls(_down(f), f)

    @classmethod
    def hull(cls, values):
        vals = list(values)
        return cls(min(vals), max(vals))

    def __repr__(self):
        return f"Interval({self.lo!r}, {self.hi!r})"

    def __eq__(self, other):
        return (
            isinstance(other, Interval)
            and self.lo == other.lo
            and self.hi == other.hi
        )

    def __hash__(self):
        return hash((self.lo, self.hi))

    def _widened(self, lo, hi):
        if math.isnan(lo) or math.isnan(hi):
            return Interval(-math.inf, math.inf)
        return Interval(_down(lo), _up(hi))

    def __add__(self, other):
        other = _coerce(other)
        return self._widened(self.lo + other.lo, self.hi + other.hi)

    __radd__ = __add__

    def __neg__(self):
        return Interval(-self.hi, -self.lo)

    def __sub__(self, other):
        return self + (-_coerce(other))

    def __rsub__(self, other):
        return _coerce(other) + (-self)

    def __mul__(self, other):
        other = _coerce(other)
        cands = (
            self.lo * other.lo,
            self.lo * other.hi,
            self.hi * other.lo,
            self.hi * other.hi,
        )
        if any(math.isnan(c) for c in cands):
            return Interval(-math.inf, math.inf)
        return self._widened(min(cands), max(cands))

    __rmul__ = __mul__

    def __pow__(self, n):
        if not isinstance(n, int) or n < 0:
            raise ValueError("only nonnegative integer powers are supported")
        if n == 0:
            return Interval(1.0, 1.0)
        if n % 2 == 1:
            return self._widened(self.lo**n, self.hi**n)
        lo_n, hi_n = self.lo**n, self.hi**n
        if self.lo >= 0:
            return self._widened(lo_n, hi_n)
        if self.hi <= 0:
            return self._widened(hi_n, lo_n)
        return self._widened(0.0, max(lo_n, hi_n))

    # -- queries --------------------------------------------------------

    def contains(self, x):
        return self.lo <= x <= self.hi

    def contains_interval(self, other):
        return self.lo <= other.lo and other.hi <= self.hi

    def width(self):
        return self.hi - self.lo

    def midpoint(self):
        return 0.5 * (self.lo + self.hi)

    def is_positive(self, margin=0.0):
        return self.lo > margin

    def is_negative(self, margin=0.0):
        return self.hi < -margin

    def strict_sign(self, margin=0.0):
        """+1, -1, or 0 when the enclosure does not clear zero by the margin."""
        if self.is_positive(margin):
            return 1
        if self.is_negative(margin):
            return -1
        return 0

    def split(self):
        m = self.midpoint()
        if not (self.lo < m < self.hi):
            return [self]
        return [Interval(self.lo, m), Interval(m, self.hi)]


def _coerce(x):
    if isinstance(x, Interval):
        return x
    return Interval.exact(x)
