"""Finitely supported probability measures on the real line.

A DiracMixture is a finite list of (location, weight) atoms with exact
rational weights summing to 1.  Locations are high precision reals (mpmath
mpf at 60 decimal digits, enough to resolve log-of-rational jump levels);
locations closer than a configurable tolerance are merged.  The empty atom
list represents the distinguished zero measure.
"""

from __future__ import annotations

import bisect
import json
from fractions import Fraction

import mpmath as mp

from .exactlog import ExactLog, as_float

_DPS = 60
LOCATION_TOL = mp.mpf("1e-30")


def _to_mpf(x):
    with mp.workdps(_DPS):
        if isinstance(x, ExactLog):
            return x.to_mpf(_DPS)
        if isinstance(x, Fraction):
            return mp.mpf(x.numerator) / x.denominator
        if isinstance(x, str):
            return mp.mpf(x)
        if isinstance(x, (int, float)):
            return mp.mpf(x)
        return mp.mpf(x)


class DiracMixture:
    """Probability measure Σ w_i δ_{x_i}; empty atoms = the zero measure."""

    __slots__ = ("atoms",)

    def __init__(self, atoms, tol=LOCATION_TOL):
        pairs = []
        for x, w in atoms:
            w = Fraction(w)
            if w < 0:
                raise ValueError("weights must be positive")
            if w == 0:
                continue
            pairs.append((_to_mpf(x), w))
        pairs.sort(key=lambda p: p[0])
        merged: list = []
        with mp.workdps(_DPS):
            for x, w in pairs:
                if merged and abs(x - merged[-1][0]) <= tol:
                    merged[-1][1] += w
                else:
                    merged.append([x, w])
        if merged:
            total = sum(w for _, w in merged)
            if total != 1:
                raise ValueError(f"weights must sum to 1, got {total}")
        object.__setattr__(self, "atoms", tuple((x, w) for x, w in merged))

    def __setattr__(self, *args):
        raise AttributeError("DiracMixture is immutable")

    @classmethod
    def point(cls, x) -> "DiracMixture":
        return cls([(x, Fraction(1))])

    @classmethod
    def zero(cls) -> "DiracMixture":
        return cls([])

    @classmethod
    def uniform(cls, locations) -> "DiracMixture":
        locations = list(locations)
        if not locations:
            return cls.zero()
        w = Fraction(1, len(locations))
        return cls([(x, w) for x in locations])

    @property
    def is_zero(self) -> bool:
        return not self.atoms

    def locations(self):
        return [x for x, _ in self.atoms]

    def weights(self):
        return [w for _, w in self.atoms]

    def cdf(self, t) -> Fraction:
        """Right-continuous CDF value at t, an exact rational."""
        t = _to_mpf(t)
        acc = Fraction(0)
        with mp.workdps(_DPS):
            cutoff = t + LOCATION_TOL
            for x, w in self.atoms:
                if x <= cutoff:
                    acc += w
                else:
                    break
        return acc

    def tail_mass(self, t) -> Fraction:
        """Mass of [t, +inf), an exact rational."""
        t = _to_mpf(t)
        acc = Fraction(0)
        with mp.workdps(_DPS):
            cutoff = t - LOCATION_TOL
            for x, w in self.atoms:
                if x >= cutoff:
                    acc += w
        return acc

    def translate(self, a) -> "DiracMixture":
        a = _to_mpf(a)
        with mp.workdps(_DPS):
            return DiracMixture([(x + a, w) for x, w in self.atoms])

    def rescale(self, eps) -> "DiracMixture":
        eps = _to_mpf(eps)
        if eps <= 0:
            raise ValueError("rescale factor must be positive")
        with mp.workdps(_DPS):
            return DiracMixture([(x * eps, w) for x, w in self.atoms])

    def integrate(self, h) -> float:
        """Integral of a piecewise-linear h against the measure."""
        fn = h.evaluate if isinstance(h, PiecewiseLinear) else h
        with mp.workdps(_DPS):
            total = mp.mpf(0)
            for x, w in self.atoms:
                val = fn(x)
                if val is None:
                    raise ValueError(f"integrand undefined at atom {x}")
                total += (mp.mpf(w.numerator) / w.denominator) * _to_mpf(val)
            return float(total)

    def __eq__(self, other):
        if not isinstance(other, DiracMixture):
            return NotImplemented
        if len(self.atoms) != len(other.atoms):
            return False
        with mp.workdps(_DPS):
            return all(
                abs(x1 - x2) <= LOCATION_TOL and w1 == w2
                for (x1, w1), (x2, w2) in zip(self.atoms, other.atoms)
            )

    def __hash__(self):
        return hash(tuple((str(x), w) for x, w in self.atoms))

    def __repr__(self):
        if self.is_zero:
            return "DiracMixture(zero)"
        parts = " + ".join(f"{w}*d({mp.nstr(x, 8)})" for x, w in self.atoms)
        return f"DiracMixture({parts})"

    # -- serialization --------------------------------------------------

    def to_json(self, digits: int = 50) -> str:
        with mp.workdps(_DPS):
            atoms = [
                {"x": mp.nstr(x, digits), "w": f"{w.numerator}/{w.denominator}"}
                for x, w in self.atoms
            ]
        return json.dumps({"atoms": atoms})

    @classmethod
    def from_json(cls, text: str) -> "DiracMixture":
        data = json.loads(text)
        return cls([(a["x"], Fraction(a["w"])) for a in data["atoms"]])

    def to_csv(self, digits: int = 50) -> str:
        lines = ["x,w,cdf"]
        acc = Fraction(0)
        with mp.workdps(_DPS):
            for x, w in self.atoms:
                acc += w
                lines.append(f"{mp.nstr(x, digits)},{w},{acc}")
        return "\n".join(lines) + "\n"


class PiecewiseLinear:
    """Continuous piecewise-linear function on the real line.

    Defined by breakpoints b_1 < ... < b_k, the value at b_1, the slope
    before b_1, the slopes on each interval (b_i, b_{i+1}) and the slope
    after b_k.  With no breakpoints it is the affine map value0 + slope*x.
    """

    __slots__ = ("breakpoints", "value_at_first", "slopes")

    def __init__(self, breakpoints, value_at_first, slopes):
        breakpoints = [_to_mpf(b) for b in breakpoints]
        if any(b2 <= b1 for b1, b2 in zip(breakpoints, breakpoints[1:])):
            raise ValueError("breakpoints must be strictly increasing")
        slopes = [_to_mpf(s) for s in slopes]
        if len(slopes) != len(breakpoints) + 1:
            raise ValueError("need one slope per interval")
        object.__setattr__(self, "breakpoints", tuple(breakpoints))
        object.__setattr__(self, "value_at_first", _to_mpf(value_at_first))
        object.__setattr__(self, "slopes", tuple(slopes))

    def __setattr__(self, *args):
        raise AttributeError("PiecewiseLinear is immutable")

    @classmethod
    def relu(cls) -> "PiecewiseLinear":
        """max{x, 0}."""
        return cls([0], 0, [0, 1])

    @classmethod
    def identity(cls) -> "PiecewiseLinear":
        return cls([0], 0, [1, 1])

    @classmethod
    def min_with(cls, cap) -> "PiecewiseLinear":
        """min{x, cap}."""
        return cls([cap], cap, [1, 0])

    def evaluate(self, x):
        x = _to_mpf(x)
        if not self.breakpoints:
            return self.value_at_first + self.slopes[0] * x
        val = self.value_at_first
        b0 = self.breakpoints[0]
        if x <= b0:
            return val + self.slopes[0] * (x - b0)
        prev = b0
        for i, b in enumerate(self.breakpoints[1:], start=1):
            if x <= b:
                return val + self.slopes[i] * (x - prev)
            val += self.slopes[i] * (b - prev)
            prev = b
        return val + self.slopes[-1] * (x - prev)

    def shifted(self, a) -> "PiecewiseLinear":
        """The function x -> h(x + a)."""
        a = _to_mpf(a)
        b0 = self.breakpoints[0] if self.breakpoints else _to_mpf(0)
        new_first_val = self.evaluate(b0) if self.breakpoints else self.evaluate(a)
        if not self.breakpoints:
            return PiecewiseLinear([], new_first_val, self.slopes)
        return PiecewiseLinear(
            [b - a for b in self.breakpoints], new_first_val, self.slopes
        )

    def sup_norm_on(self, lo, hi):
        """max |h| over [lo, hi] (attained at endpoints or breakpoints)."""
        lo, hi = _to_mpf(lo), _to_mpf(hi)
        pts = [lo, hi] + [b for b in self.breakpoints if lo < b < hi]
        return max(abs(self.evaluate(p)) for p in pts)


def dominates(m1: DiracMixture, m2: DiracMixture) -> str:
    """Compare in the stochastic order via pointwise CDF comparison.

    Returns "first" when m2 < m1 (m1 puts mass further right), "second"
    when m1 < m2, "equal", or "incomparable".
    """
    if m1.is_zero or m2.is_zero:
        raise ValueError("stochastic comparison requires probability measures")
    grid = sorted(set(m1.locations()) | set(m2.locations()))
    first_ok = True  # F_{m1} <= F_{m2} pointwise, i.e. m2 < m1
    second_ok = True
    for t in grid:
        f1, f2 = m1.cdf(t), m2.cdf(t)
        if f1 > f2:
            first_ok = False
        if f2 > f1:
            second_ok = False
    if first_ok and second_ok:
        return "equal"
    if first_ok:
        return "first"
    if second_ok:
        return "second"
    return "incomparable"


def cdf_distance(m1: DiracMixture, m2: DiracMixture) -> float:
    """Levy distance: inf{e > 0 | F1(t-e)-e <= F2(t) <= F1(t+e)+e for all t}.

    Computed by bisection; feasibility at a given e is checked on the merged
    breakpoint grid (shifted both ways), which is exact for step CDFs.
    """
    if m1.is_zero and m2.is_zero:
        return 0.0
    if m1.is_zero or m2.is_zero:
        raise ValueError("Levy distance requires probability measures")
    with mp.workdps(_DPS):
        locs = sorted(set(m1.locations()) | set(m2.locations()))

        def prefix(m):
            xs, cs = [], []
            acc = Fraction(0)
            for x, w in m.atoms:
                acc += w
                xs.append(x)
                cs.append(mp.mpf(acc.numerator) / acc.denominator)
            return xs, cs

        xs1, cs1 = prefix(m1)
        xs2, cs2 = prefix(m2)
        zero = mp.mpf(0)

        def cdf_at(xs, cs, t):
            i = bisect.bisect_right(xs, t + LOCATION_TOL)
            return cs[i - 1] if i else zero

        slack = mp.mpf("1e-40")

        def feasible(e):
            probes = set()
            for t in locs:
                probes.update((t, t - e, t + e))
            for t in probes:
                lo = cdf_at(xs1, cs1, t - e) - e
                hi = cdf_at(xs1, cs1, t + e) + e
                f2 = cdf_at(xs2, cs2, t)
                if not (lo <= f2 + slack and f2 <= hi + slack):
                    return False
                lo2 = cdf_at(xs2, cs2, t - e) - e
                hi2 = cdf_at(xs2, cs2, t + e) + e
                f1 = cdf_at(xs1, cs1, t)
                if not (lo2 <= f1 + slack and f1 <= hi2 + slack):
                    return False
            return True

        if feasible(mp.mpf(0)):
            return 0.0
        hi = mp.mpf(1)
        span = locs[-1] - locs[0]
        if span > 1:
            hi = span
        lo = mp.mpf(0)
        for _ in range(80):
            mid = (lo + hi) / 2
            if feasible(mid):
                hi = mid
            else:
                lo = mid
        return float(hi)


__all__ = [
    "DiracMixture",
    "PiecewiseLinear",
    "dominates",
    "cdf_distance",
    "as_float",
    "LOCATION_TOL",
]
