"""Real-indexed decreasing filtrations of finite-dimensional rational spaces.

A FilteredSpace stores a minimal flag: a list of (exit_level, basis) pairs
with strictly increasing levels and strictly decreasing ranks.  The member
at level t is the basis of the first entry whose exit level is >= t; below
the first exit level the filtration equals the whole space (so the first
entry always spans the ambient space), above the last it is zero.  This
makes the rank function a left-continuous step function by construction.

Levels may be ints, Fractions, floats or ExactLog values; bases are exact
rational matrices whose columns span the member.
"""

from __future__ import annotations

import json
from fractions import Fraction

import mpmath as mp

from . import linalg
from .exactlog import ExactLog, as_float
from .measure import DiracMixture
from .report import PASS, FAIL, HYPOTHESIS_FAILED, AuditEntry

INF = float("inf")


def _level_key(t):
    return as_float(t)


class FilteredSpace:
    __slots__ = ("ambient_dim", "flag")

    def __init__(self, ambient_dim: int, flag):
        ambient_dim = int(ambient_dim)
        if ambient_dim < 0:
            raise ValueError("ambient dimension must be nonnegative")
        entries = []
        for t, basis in flag:
            basis = linalg.frac_matrix(basis)
            r = linalg.rank(basis)
            if r != linalg.num_cols(basis):
                raise ValueError("flag basis must have full column rank")
            if r == 0:
                continue
            if len(basis) != ambient_dim:
                raise ValueError("flag basis has wrong ambient dimension")
            entries.append((t, basis, r))
        entries.sort(key=lambda e: _level_key(e[0]))
        # Merge repeated levels and non-strict nesting: a member persisting
        # across several listed levels exits at the largest of them.
        merged = []
        for t, basis, r in entries:
            if merged and merged[-1][2] == r:
                prev = merged[-1]
                if not all(
                    linalg.in_colspace(prev[1], col) for col in linalg.columns(basis)
                ):
                    raise ValueError("equal-rank flag entries span different spaces")
                merged[-1] = (t, prev[1], r)
            else:
                merged.append((t, basis, r))
        for (t1, b1, r1), (t2, b2, r2) in zip(merged, merged[1:]):
            if r2 >= r1:
                raise ValueError("flag ranks must strictly decrease")
            if not all(linalg.in_colspace(b1, col) for col in linalg.columns(b2)):
                raise ValueError("flag members must be nested")
        if ambient_dim > 0:
            if not merged or merged[0][2] != ambient_dim:
                raise ValueError("first flag entry must span the whole space")
        object.__setattr__(
            self, "flag", tuple((t, b) for t, b, _ in merged)
        )
        object.__setattr__(self, "ambient_dim", ambient_dim)

    def __setattr__(self, *args):
        raise AttributeError("FilteredSpace is immutable")

    @classmethod
    def zero(cls) -> "FilteredSpace":
        return cls(0, [])

    @classmethod
    def single_jump(cls, dim: int, level) -> "FilteredSpace":
        return cls(dim, [(level, linalg.identity(dim))])

    @property
    def is_zero(self) -> bool:
        return self.ambient_dim == 0

    def levels(self):
        return [t for t, _ in self.flag]

    def ranks(self):
        return [linalg.num_cols(b) for _, b in self.flag]

    def member_at(self, t):
        """Basis (columns) of the filtration member at level t."""
        for level, basis in self.flag:
            if _level_key(t) <= _level_key(level):
                return basis
        return [[] for _ in range(self.ambient_dim)]

    def rank_at(self, t) -> int:
        return linalg.num_cols(self.member_at(t))

    def measure_of(self) -> DiracMixture:
        if self.is_zero:
            return DiracMixture.zero()
        atoms = []
        ranks = self.ranks() + [0]
        for (t, _), r, r_next in zip(self.flag, ranks, ranks[1:]):
            atoms.append((t, Fraction(r - r_next, self.ambient_dim)))
        return DiracMixture(atoms)

    def lambda_of(self, v):
        """Largest level whose member contains v; +inf for v = 0."""
        v = [Fraction(x) for x in v]
        if len(v) != self.ambient_dim:
            raise ValueError("vector has wrong dimension")
        if all(x == 0 for x in v):
            return INF
        result = None
        for t, basis in self.flag:
            if linalg.in_colspace(basis, v):
                result = t
            else:
                break
        if result is None:
            raise ValueError("vector lies outside the ambient space")
        return result

    def lambda_extremes(self):
        """(lambda_max, lambda_min); (-inf, +inf) for the zero space."""
        if self.is_zero:
            return (-INF, INF)
        return (self.flag[-1][0], self.flag[0][0])

    # -- induced filtrations --------------------------------------------

    def induced_sub(self, subspace) -> "FilteredSpace":
        """Filtration t -> F_t & V in the coordinates of the given basis."""
        subspace = linalg.frac_matrix(subspace)
        k = linalg.num_cols(subspace)
        if k == 0:
            return FilteredSpace.zero()
        if linalg.rank(subspace) != k:
            raise ValueError("subspace basis must have full column rank")
        entries = []
        for t, basis in self.flag:
            inter = linalg.intersect_colspaces(basis, subspace)
            if linalg.num_cols(inter) == 0:
                break
            coords = [
                linalg.solve_columns(subspace, col) for col in linalg.columns(inter)
            ]
            entries.append((t, linalg.from_columns(coords, nrows=k)))
        return FilteredSpace(k, entries)

    def induced_quotient(self, subspace) -> "FilteredSpace":
        """Image filtration t -> (F_t + V)/V in deterministic coordinates.

        Coordinates come from completing V's basis with standard basis
        vectors by greedy pivoting; the quotient coordinate of w is the
        trailing block of the full-basis coefficient vector of w.
        """
        subspace = linalg.frac_matrix(subspace)
        k = linalg.num_cols(subspace)
        if k and linalg.rank(subspace) != k:
            raise ValueError("subspace basis must have full column rank")
        q = self.ambient_dim - k
        if q == 0:
            return FilteredSpace.zero()
        if k == 0:
            return self
        full = linalg.complete_basis(subspace)
        inv = linalg.inverse(full)
        proj = inv[k:]
        entries = []
        for t, basis in self.flag:
            image = linalg.colspace_basis(linalg.matmul(proj, basis))
            if linalg.num_cols(image) == 0:
                break
            entries.append((t, image))
        return FilteredSpace(q, entries)

    # -- serialization ---------------------------------------------------

    def to_json(self) -> str:
        def frac_str(x):
            f = Fraction(x)
            return f"{f.numerator}/{f.denominator}"

        flag = []
        with mp.workdps(60):
            for t, basis in self.flag:
                flag.append(
                    {
                        "t": mp.nstr(mp.mpf(as_float(t)), 50)
                        if not isinstance(t, (int, Fraction))
                        else str(t),
                        "basis": [[frac_str(x) for x in row] for row in basis],
                    }
                )
        return json.dumps({"dim": self.ambient_dim, "flag": flag})

    @classmethod
    def from_json(cls, text: str) -> "FilteredSpace":
        data = json.loads(text)
        flag = []
        for entry in data["flag"]:
            t_raw = entry["t"]
            t = Fraction(t_raw) if "/" in t_raw or "." not in t_raw else float(t_raw)
            flag.append((t, [[Fraction(x) for x in row] for row in entry["basis"]]))
        return cls(data["dim"], flag)

    def __repr__(self):
        jumps = ", ".join(
            f"{as_float(t):.4g}:{linalg.num_cols(b)}" for t, b in self.flag
        )
        return f"FilteredSpace(dim={self.ambient_dim}, exits=[{jumps}])"


def check_exact_sequence(
    fs_sub: FilteredSpace, fs_total: FilteredSpace, fs_quot: FilteredSpace
) -> AuditEntry:
    """Verify the measure identity for 0 -> V -> W -> W/V -> 0.

    The measure of W must equal the rank-weighted mixture of the induced
    sub and quotient measures, exactly on weights (locations merged by the
    measure tolerance).
    """
    r = fs_total.ambient_dim
    if fs_sub.ambient_dim + fs_quot.ambient_dim != r:
        raise ValueError("ranks of sub and quotient must add up to the total")
    lhs = fs_total.measure_of()
    parts = []
    for fs in (fs_sub, fs_quot):
        w = Fraction(fs.ambient_dim, r)
        for x, m in fs.measure_of().atoms:
            parts.append((x, w * m))
    rhs = DiracMixture(parts)
    ok = lhs == rhs
    return AuditEntry(
        id="exact-sequence-measure",
        lhs=[(str(x), w) for x, w in lhs.atoms],
        rhs=[(str(x), w) for x, w in rhs.atoms],
        margin=0 if ok else None,
        verdict=PASS if ok else FAIL,
    )


def check_shift_domination(
    fs_v: FilteredSpace, fs_w: FilteredSpace, iso, a
) -> AuditEntry:
    """Check that a level-shifting isomorphism forces measure domination.

    Hypothesis (verified first, exactly): iso maps the member of fs_v at
    each level t into the member of fs_w at level t + a.  Conclusion: the
    measure of fs_w dominates the a-translate of the measure of fs_v.
    """
    iso = linalg.frac_matrix(iso)
    if linalg.rank(iso) != fs_v.ambient_dim or len(iso) != fs_w.ambient_dim:
        raise ValueError("map must be injective from the source space")
    for t, basis in fs_v.flag:
        target = fs_w.member_at(as_float(t) + as_float(a))
        for col in linalg.columns(basis):
            if not linalg.in_colspace(target, linalg.matvec(iso, col)):
                return AuditEntry(
                    id="shift-domination",
                    lhs=None,
                    rhs=None,
                    margin=None,
                    verdict=HYPOTHESIS_FAILED,
                    detail=f"image of level-{as_float(t)} member not inside "
                    f"level-{as_float(t) + as_float(a)} member",
                )
    from .measure import dominates

    nu_w = fs_w.measure_of()
    shifted = fs_v.measure_of().translate(a)
    verdict = dominates(nu_w, shifted)
    ok = verdict in ("first", "equal")
    return AuditEntry(
        id="shift-domination",
        lhs=[(str(x), w) for x, w in nu_w.atoms],
        rhs=[(str(x), w) for x, w in shifted.atoms],
        margin=None,
        verdict=PASS if ok else FAIL,
        detail=f"order={verdict}",
    )
