"""Exact arithmetic with numbers of the form log(q)/m for positive rational q.

Logarithmic lattice invariants (degrees, slopes, minima) and the additive
constants of the audited inequalities (log(3/2), log r, (1/2)log d, ...) are
all of this shape, so inequality verdicts reduce to comparisons of exact
rational numbers: log(q1)/m1 <= log(q2)/m2 iff q1**m2 <= q2**m1.
"""

from __future__ import annotations

import math
from fractions import Fraction

import mpmath as mp

_DPS = 60


def _lcm(a: int, b: int) -> int:
    return a // math.gcd(a, b) * b


class ExactLog:
    """The real number log(q)/m with q a positive rational and m >= 1.

    Closed under negation, addition and multiplication by rationals.
    Comparisons between two ExactLog values (and against exact rationals)
    are decided exactly; comparisons against floats fall back to high
    precision floating point.
    """

    __slots__ = ("q", "m")

    def __init__(self, q, m: int = 1):
        q = Fraction(q)
        if q <= 0:
            raise ValueError("q must be a positive rational")
        m = int(m)
        if m <= 0:
            raise ValueError("m must be a positive integer")
        if q == 1:
            m = 1
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "m", m)

    def __setattr__(self, *args):
        raise AttributeError("ExactLog is immutable")

    # -- constructors -------------------------------------------------

    @classmethod
    def log(cls, q) -> "ExactLog":
        return cls(q, 1)

    @classmethod
    def half_log(cls, q) -> "ExactLog":
        return cls(q, 2)

    @classmethod
    def zero(cls) -> "ExactLog":
        return cls(1, 1)

    # -- arithmetic ----------------------------------------------------

    def __neg__(self) -> "ExactLog":
        return ExactLog(1 / self.q, self.m)

    def __add__(self, other):
        if isinstance(other, ExactLog):
            m = _lcm(self.m, other.m)
            return ExactLog(
                self.q ** (m // self.m) * other.q ** (m // other.m), m
            )
        if isinstance(other, (int, Fraction)) and other == 0:
            return self
        if isinstance(other, (int, float, Fraction)):
            return float(self) + float(other)
        return NotImplemented

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, ExactLog):
            return self + (-other)
        if isinstance(other, (int, Fraction)) and other == 0:
            return self
        if isinstance(other, (int, float, Fraction)):
            return float(self) - float(other)
        return NotImplemented

    def __rsub__(self, other):
        neg = -self
        return neg + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            c = Fraction(other)
            if c == 0:
                return ExactLog.zero()
            num, den = c.numerator, c.denominator
            q = self.q ** num if num > 0 else (1 / self.q) ** (-num)
            return ExactLog(q, self.m * den)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * (Fraction(1) / Fraction(other))
        return NotImplemented

    # -- comparisons ---------------------------------------------------

    def _cmp(self, other) -> int:
        """Return -1, 0 or 1 for self <, ==, > other."""
        if isinstance(other, ExactLog):
            lhs = self.q ** other.m
            rhs = other.q ** self.m
            return (lhs > rhs) - (lhs < rhs)
        if isinstance(other, (int, Fraction)) and other == 0:
            return (self.q > 1) - (self.q < 1)
        if isinstance(other, (int, float, Fraction)):
            with mp.workdps(_DPS):
                a = self.to_mpf()
                b = mp.mpf(other.numerator) / other.denominator if isinstance(
                    other, Fraction
                ) else mp.mpf(other)
                return (a > b) - (a < b)
        return NotImplemented

    def __eq__(self, other):
        c = self._cmp(other)
        return NotImplemented if c is NotImplemented else c == 0

    def __lt__(self, other):
        c = self._cmp(other)
        return NotImplemented if c is NotImplemented else c < 0

    def __le__(self, other):
        c = self._cmp(other)
        return NotImplemented if c is NotImplemented else c <= 0

    def __gt__(self, other):
        c = self._cmp(other)
        return NotImplemented if c is NotImplemented else c > 0

    def __ge__(self, other):
        c = self._cmp(other)
        return NotImplemented if c is NotImplemented else c >= 0

    def __hash__(self):
        # Equal values can have different (q, m); hash a canonical float key.
        return hash(round(float(self), 12))

    # -- conversions ---------------------------------------------------

    def to_mpf(self, dps: int | None = None):
        work = dps if dps is not None else mp.mp.dps
        with mp.workdps(work):
            val = (
                mp.log(mp.mpf(self.q.numerator))
                - mp.log(mp.mpf(self.q.denominator))
            ) / self.m
        return val

    def __float__(self) -> float:
        with mp.workdps(_DPS):
            return float(self.to_mpf())

    def __repr__(self):
        return f"ExactLog(log({self.q})/{self.m} ~ {float(self):.6g})"

    def is_zero(self) -> bool:
        return self.q == 1


def as_float(x) -> float:
    """Coerce a level/margin value (number or ExactLog) to float."""
    if isinstance(x, ExactLog):
        return float(x)
    if isinstance(x, Fraction):
        return x.numerator / x.denominator
    return float(x)
