"""Normed integer lattices: degrees, slopes, minima, point counts, audits.

A NormedLattice is Z^r with one of three norms (Euclidean from an exact
positive-definite rational Gram matrix, diagonal-max from log-weights, or
polyhedral-max from rational functionals) and a base descriptor carrying
the field degree delta and log-discriminant used in the audited formulas.

All invariants that are logarithms of rationals (or of their roots) are
kept as ExactLog values, so inequality audits are decided by exact integer
arithmetic whenever the constants allow it.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction

from . import linalg
from .exactlog import ExactLog, as_float
from .filtration import FilteredSpace
from .report import PASS, FAIL, UNVERIFIED, AuditEntry, AuditReport

DEFAULT_NODE_BUDGET = 10**7


class BudgetExhausted(RuntimeError):
    """Enumeration node budget exceeded."""


class UnverifiedCertificate(RuntimeError):
    """Slope filtration heuristic could not certify its result."""


class UnsupportedNorm(TypeError):
    """Operation not defined for this norm type."""


# ---------------------------------------------------------------------------
# base field and norms


class BaseField:
    __slots__ = ("degree_delta", "log_disc")

    def __init__(self, degree_delta: int = 1, log_disc: float = 0.0):
        degree_delta = int(degree_delta)
        if degree_delta < 1:
            raise ValueError("field degree must be >= 1")
        if degree_delta == 1 and log_disc != 0:
            raise ValueError("log discriminant must vanish in degree 1")
        if log_disc < 0:
            raise ValueError("log discriminant must be nonnegative")
        object.__setattr__(self, "degree_delta", degree_delta)
        object.__setattr__(self, "log_disc", log_disc)

    def __setattr__(self, *args):
        raise AttributeError("BaseField is immutable")

    def __eq__(self, other):
        return (
            isinstance(other, BaseField)
            and self.degree_delta == other.degree_delta
            and self.log_disc == other.log_disc
        )

    def __repr__(self):
        return f"BaseField(delta={self.degree_delta}, log_disc={self.log_disc})"


RATIONAL_FIELD = BaseField(1, 0.0)


class EuclideanNorm:
    __slots__ = ("gram",)

    def __init__(self, gram):
        gram = linalg.frac_matrix(gram)
        r = len(gram)
        if any(len(row) != r for row in gram):
            raise ValueError("gram matrix must be square")
        for i in range(r):
            for j in range(i):
                if gram[i][j] != gram[j][i]:
                    raise ValueError("gram matrix must be symmetric")
        if not is_positive_definite(gram):
            raise ValueError("gram matrix must be positive definite")
        object.__setattr__(self, "gram", gram)

    def __setattr__(self, *args):
        raise AttributeError("EuclideanNorm is immutable")

    @property
    def rank(self):
        return len(self.gram)

    def squared_norm(self, x) -> Fraction:
        gx = linalg.matvec(self.gram, [Fraction(v) for v in x])
        return sum(Fraction(v) * g for v, g in zip(x, gx))

    def log_norm(self, x) -> ExactLog:
        q = self.squared_norm(x)
        if q == 0:
            raise ValueError("zero vector has no log norm")
        return ExactLog(q, 2)


class DiagonalMaxNorm:
    """Max norm with per-coordinate scale: |sum a_j e_j| = max_j e^{-c_j}|a_j|."""

    __slots__ = ("log_weights",)

    def __init__(self, log_weights):
        object.__setattr__(
            self,
            "log_weights",
            tuple(Fraction(c) if not isinstance(c, float) else c for c in log_weights),
        )

    def __setattr__(self, *args):
        raise AttributeError("DiagonalMaxNorm is immutable")

    @property
    def rank(self):
        return len(self.log_weights)


class PolyhedralMaxNorm:
    """|x| = max_i |<u_i, x>| for rational functionals u_i spanning the dual."""

    __slots__ = ("functionals",)

    def __init__(self, functionals):
        functionals = linalg.frac_matrix(functionals)
        if not functionals:
            raise ValueError("need at least one functional")
        if linalg.rank(functionals) != len(functionals[0]):
            raise ValueError("functionals must span the dual space")
        object.__setattr__(self, "functionals", functionals)

    def __setattr__(self, *args):
        raise AttributeError("PolyhedralMaxNorm is immutable")

    @property
    def rank(self):
        return len(self.functionals[0])

    def norm(self, x) -> Fraction:
        x = [Fraction(v) for v in x]
        return max(abs(sum(u * v for u, v in zip(row, x))) for row in self.functionals)

    def log_norm(self, x) -> ExactLog:
        n = self.norm(x)
        if n == 0:
            raise ValueError("zero vector has no log norm")
        return ExactLog(n, 1)


def is_positive_definite(gram) -> bool:
    """Exact leading-principal-minor test for a symmetric rational matrix."""
    n = len(gram)
    for k in range(1, n + 1):
        minor = [row[:k] for row in gram[:k]]
        if linalg.det(minor) <= 0:
            return False
    return True


class NormedLattice:
    __slots__ = ("rank", "norm", "base")

    def __init__(self, norm, base: BaseField = RATIONAL_FIELD):
        object.__setattr__(self, "norm", norm)
        object.__setattr__(self, "rank", norm.rank)
        object.__setattr__(self, "base", base)
        if self.rank < 1:
            raise ValueError("rank must be positive")

    def __setattr__(self, *args):
        raise AttributeError("NormedLattice is immutable")

    @classmethod
    def euclidean(cls, gram, base: BaseField = RATIONAL_FIELD) -> "NormedLattice":
        return cls(EuclideanNorm(gram), base)

    @classmethod
    def diagonal_max(cls, log_weights, base=RATIONAL_FIELD) -> "NormedLattice":
        return cls(DiagonalMaxNorm(log_weights), base)

    @classmethod
    def polyhedral_max(cls, functionals, base=RATIONAL_FIELD) -> "NormedLattice":
        return cls(PolyhedralMaxNorm(functionals), base)

    @property
    def is_euclidean(self):
        return isinstance(self.norm, EuclideanNorm)

    def __repr__(self):
        return f"NormedLattice(rank={self.rank}, norm={type(self.norm).__name__})"

    def to_dict(self) -> dict:
        def fr(x):
            f = Fraction(x)
            return f"{f.numerator}/{f.denominator}"

        if isinstance(self.norm, EuclideanNorm):
            norm = {
                "type": "euclidean",
                "gram": [[fr(x) for x in row] for row in self.norm.gram],
            }
        elif isinstance(self.norm, DiagonalMaxNorm):
            norm = {
                "type": "diagmax",
                "log_weights": [
                    fr(c) if not isinstance(c, float) else c
                    for c in self.norm.log_weights
                ],
            }
        else:
            norm = {
                "type": "polymax",
                "functionals": [[fr(x) for x in row] for row in self.norm.functionals],
            }
        return {
            "rank": self.rank,
            "norm": norm,
            "base": {"delta": self.base.degree_delta, "log_disc": self.base.log_disc},
        }

    @classmethod
    def from_dict(cls, data: dict) -> "NormedLattice":
        base = BaseField(data["base"]["delta"], data["base"]["log_disc"])
        norm = data["norm"]
        if norm["type"] == "euclidean":
            return cls.euclidean(
                [[Fraction(x) for x in row] for row in norm["gram"]], base
            )
        if norm["type"] == "diagmax":
            return cls.diagonal_max(
                [
                    Fraction(c) if isinstance(c, str) else c
                    for c in norm["log_weights"]
                ],
                base,
            )
        if norm["type"] == "polymax":
            return cls.polyhedral_max(
                [[Fraction(x) for x in row] for row in norm["functionals"]], base
            )
        raise ValueError(f"unknown norm type {norm['type']!r}")


# ---------------------------------------------------------------------------
# exact enumeration


def _ldl(gram):
    """Decompose Q(x) = sum_i d_i (x_i + sum_{j>i} u[i][j] x_j)^2 exactly."""
    r = len(gram)
    a = [list(row) for row in gram]
    d = [Fraction(0)] * r
    u = [[Fraction(0)] * r for _ in range(r)]
    for i in range(r):
        d[i] = a[i][i]
        if d[i] <= 0:
            raise ValueError("gram matrix is not positive definite")
        for j in range(i + 1, r):
            u[i][j] = a[i][j] / d[i]
        for j in range(i + 1, r):
            for k in range(j, r):
                a[j][k] -= u[i][j] * a[i][k]
                a[k][j] = a[j][k]
    return d, u


def short_vectors(gram, bound, budget: int = DEFAULT_NODE_BUDGET):
    """All x in Z^r with 0 < Q(x) <= bound, one representative per {x,-x}.

    The representative has its last nonzero coordinate positive.  Returns a
    list of (vector tuple, squared norm Fraction) and raises BudgetExhausted
    when more than `budget` candidate nodes are visited.
    """
    gram = linalg.frac_matrix(gram)
    r = len(gram)
    bound = Fraction(bound)
    if bound <= 0:
        return []
    d, u = _ldl(gram)
    out = []
    x = [0] * r
    nodes = [0]

    def recurse(i, remaining, all_zero_above):
        if nodes[0] > budget:
            raise BudgetExhausted(f"enumeration exceeded {budget} nodes")
        if i < 0:
            if not all_zero_above:
                q = bound - remaining
                out.append((tuple(x), q))
            return
        center = sum(u[i][j] * x[j] for j in range(i + 1, r))
        # float window widened by 1 on each side; every candidate is
        # checked exactly before descending.
        half = math.sqrt(float(remaining / d[i])) if remaining > 0 else 0.0
        lo = math.floor(-float(center) - half) - 1
        hi = math.ceil(-float(center) + half) + 1
        if all_zero_above:
            lo = max(lo, 0)
        for xi in range(lo, hi + 1):
            nodes[0] += 1
            if nodes[0] > budget:
                raise BudgetExhausted(f"enumeration exceeded {budget} nodes")
            term = d[i] * (xi + center) ** 2
            if term > remaining:
                continue
            x[i] = xi
            recurse(i - 1, remaining - term, all_zero_above and xi == 0)
        x[i] = 0

    recurse(r - 1, bound, True)
    out.sort(key=lambda vq: (vq[1], vq[0]))
    return out


def _box_vectors(norm: PolyhedralMaxNorm, bound, budget: int = DEFAULT_NODE_BUDGET):
    """All x with 0 < |x| <= bound for a polyhedral max norm, up to sign."""
    bound = Fraction(bound)
    r = norm.rank
    rows = norm.functionals
    # pick r independent functionals; the ball lies in V^{-1}[-b,b]^r
    indep = []
    seen = []
    for row in rows:
        cand = seen + [row]
        if linalg.rank(cand) > len(seen):
            seen = cand
            indep.append(row)
        if len(indep) == r:
            break
    vinv = linalg.inverse(indep)
    limits = [
        int(math.floor(float(sum(abs(e) for e in row) * bound))) for row in vinv
    ]
    out = []
    nodes = 0
    for coords in itertools.product(*[range(-l, l + 1) for l in limits]):
        nodes += 1
        if nodes > budget:
            raise BudgetExhausted(f"box enumeration exceeded {budget} nodes")
        if all(c == 0 for c in coords):
            continue
        last_nonzero = next(c for c in reversed(coords) if c != 0)
        if last_nonzero < 0:
            continue
        n = norm.norm(coords)
        if 0 < n <= bound:
            out.append((coords, n))
    out.sort(key=lambda vq: (vq[1], vq[0]))
    return out


# ---------------------------------------------------------------------------
# minima and filtrations


def _minima_with_spans(lattice: NormedLattice, budget: int = DEFAULT_NODE_BUDGET):
    """Sorted vectors realizing the successive minima.

    Returns (minima, spans): minima is the list of ExactLog values
    e_1 >= ... >= e_r, spans is the list of (ExactLog level, basis columns)
    for each distinct minimum, basis spanning all vectors of norm up to it.
    """
    norm = lattice.norm
    r = lattice.rank
    if isinstance(norm, DiagonalMaxNorm):
        order = sorted(range(r), key=lambda j: -as_float(norm.log_weights[j]))
        minima = [norm.log_weights[j] for j in order]
        spans = []
        taken = []
        i = 0
        while i < r:
            j = i
            while j < r and minima[j] == minima[i]:
                taken.append(order[j])
                j += 1
            basis = [
                [Fraction(1) if row == col else Fraction(0) for col in taken]
                for row in range(r)
            ]
            spans.append((minima[i], basis))
            i = j
        return minima, spans
    if isinstance(norm, EuclideanNorm):
        bound = max(norm.gram[j][j] for j in range(r))
        vecs = short_vectors(norm.gram, bound, budget)
        keyed = [(q, v) for v, q in vecs]
    elif isinstance(norm, PolyhedralMaxNorm):
        bound = max(
            norm.norm([1 if i == j else 0 for i in range(r)]) for j in range(r)
        )
        vecs = _box_vectors(norm, bound, budget)
        keyed = [(n, v) for v, n in vecs]
    else:
        raise UnsupportedNorm(type(norm).__name__)
    half = 2 if isinstance(norm, EuclideanNorm) else 1
    minima_q = []
    spans = []
    basis_cols = []
    for q, v in keyed:
        if len(basis_cols) == r:
            break
        cand = basis_cols + [[Fraction(c) for c in v]]
        if linalg.rank(linalg.from_columns(cand, nrows=r)) > len(basis_cols):
            basis_cols = cand
            minima_q.append(q)
        else:
            # vector already in the running span; extend the span record
            # (same span persists, nothing to do)
            pass
    if len(basis_cols) != r:
        raise RuntimeError("enumeration bound failed to span the lattice")
    minima = [ExactLog(Fraction(1) / q, half) for q in minima_q]
    # group by distinct minimum value, span = all vectors of norm <= value
    distinct = []
    for q in minima_q:
        if not distinct or q != distinct[-1]:
            distinct.append(q)
    for q in distinct:
        cols = [[Fraction(c) for c in v] for qq, v in keyed if qq <= q]
        span = linalg.colspace_basis(linalg.from_columns(cols, nrows=r))
        spans.append((ExactLog(Fraction(1) / q, half), span))
    return minima, spans


def successive_minima(lattice: NormedLattice, budget: int = DEFAULT_NODE_BUDGET):
    """Logarithmic successive minima e_1 >= ... >= e_r as ExactLog values."""
    minima, _ = _minima_with_spans(lattice, budget)
    return minima


def minimum_filtration(
    lattice: NormedLattice, budget: int = DEFAULT_NODE_BUDGET
) -> FilteredSpace:
    """Filtration by spans of lattice vectors of norm <= e^{-t}."""
    _, spans = _minima_with_spans(lattice, budget)
    # spans are listed from largest level (smallest ball) to smallest; the
    # flag wants increasing exit levels, whole space first.
    flag = [(level, basis) for level, basis in reversed(spans)]
    return FilteredSpace(lattice.rank, flag)


def h0(lattice: NormedLattice, budget: int = DEFAULT_NODE_BUDGET) -> ExactLog:
    """Log of the number of lattice points of norm at most 1."""
    norm = lattice.norm
    if isinstance(norm, DiagonalMaxNorm):
        count = 1
        for c in norm.log_weights:
            count *= 2 * _floor_exp(c) + 1
        return ExactLog(count, 1)
    if isinstance(norm, EuclideanNorm):
        vecs = short_vectors(norm.gram, 1, budget)
        return ExactLog(1 + 2 * len(vecs), 1)
    if isinstance(norm, PolyhedralMaxNorm):
        vecs = _box_vectors(norm, 1, budget)
        return ExactLog(1 + 2 * len(vecs), 1)
    raise UnsupportedNorm(type(norm).__name__)


def _floor_exp(c) -> int:
    """Exact floor(e^c) for rational or float c (0 when e^c < 1)."""
    import mpmath as mp

    if as_float(c) < 0:
        return 0
    cf = as_float(c)
    dps = max(30, int(cf / math.log(10)) + 30)
    with mp.workdps(dps):
        if isinstance(c, Fraction):
            val = mp.exp(mp.mpf(c.numerator) / c.denominator)
        else:
            val = mp.exp(mp.mpf(c))
        fl = int(mp.floor(val))
        # guard against the value sitting on an integer boundary
        with mp.workdps(dps + 20):
            if isinstance(c, Fraction):
                val2 = mp.exp(mp.mpf(c.numerator) / c.denominator)
            else:
                val2 = mp.exp(mp.mpf(c))
            fl2 = int(mp.floor(val2))
        if fl != fl2:
            raise ArithmeticError(f"floor(e^{c}) not resolved at {dps} digits")
    return fl


# ---------------------------------------------------------------------------
# degree, slopes, Harder-Narasimhan flag


def arakelov_degree(lattice: NormedLattice):
    """Minus log covolume: -(1/2) log det(gram); rank-1 case for any norm."""
    norm = lattice.norm
    if isinstance(norm, EuclideanNorm):
        return ExactLog(Fraction(1) / linalg.det(norm.gram), 2)
    if lattice.rank == 1:
        if isinstance(norm, DiagonalMaxNorm):
            c = norm.log_weights[0]
            return ExactLog.zero() if c == 0 else c
        return -norm.log_norm([1])
    raise UnsupportedNorm("degree of rank > 1 needs a Euclidean norm")


def _sub_slope(gram, cols, delta: int) -> ExactLog:
    """Slope of the sublattice spanned by integer columns (assumed a basis)."""
    s = linalg.from_columns([list(c) for c in cols], nrows=len(gram))
    gs = linalg.matmul(linalg.matmul(linalg.transpose(s), gram), s)
    d = linalg.det(gs)
    return ExactLog(Fraction(1) / d, 2 * delta * len(cols))


class HNFlag:
    """Members (saturated integer bases, increasing rank, last = Z^r) and
    strictly decreasing subquotient slopes."""

    __slots__ = ("members", "slopes")

    def __init__(self, members, slopes):
        object.__setattr__(self, "members", tuple(members))
        object.__setattr__(self, "slopes", tuple(slopes))

    def __setattr__(self, *args):
        raise AttributeError("HNFlag is immutable")

    @property
    def is_semistable(self):
        return len(self.members) == 1

    def __repr__(self):
        ranks = [linalg.num_cols(m) for m in self.members]
        slopes = [f"{float(s):.4g}" for s in self.slopes]
        return f"HNFlag(ranks={ranks}, slopes={slopes})"


def _candidate_vectors(gram, kappa: int, budget: int, cap: int):
    r = len(gram)
    bound = max(gram[j][j] for j in range(r))
    vecs = short_vectors(gram, bound, budget)
    minima_q = []
    cols = []
    for v, q in vecs:
        cand = cols + [[Fraction(c) for c in v]]
        if linalg.rank(linalg.from_columns(cand, nrows=r)) > len(cols):
            cols = cand
            minima_q.append(q)
        if len(cols) == r:
            break
    q_r = minima_q[-1]
    vecs = short_vectors(gram, kappa * kappa * q_r, budget)
    seen = set()
    prims = []
    for v, _ in vecs:
        p = tuple(linalg.primitive_vector(v))
        if p not in seen:
            seen.add(p)
            prims.append(list(p))
        if len(prims) >= cap:
            break
    return prims


def _max_slope_subspace(gram, delta, kappa, budget, cap=48, beam=64):
    """Best destabilizing saturated sublattice: returns (basis, slope).

    Heuristic search over saturations of spans of short primitive vectors,
    breadth-first by rank with slope-ordered beam pruning.
    """
    r = len(gram)
    full_det = linalg.det(gram)
    best_slope = ExactLog(Fraction(1) / full_det, 2 * delta * r)
    best = [(linalg.identity(r, one=1), r, best_slope)]
    if r == 1:
        return best[0][0], best[0][2]
    if r >= 4:
        cap = min(cap, 32)
        beam = min(beam, 48)
    cands = _candidate_vectors(gram, kappa, budget, cap)
    frontier = {}
    for idx, v in enumerate(cands):
        s = linalg.from_columns([[int(c) for c in v]], nrows=r)
        slope = _sub_slope(gram, linalg.columns(s), delta)
        frontier[linalg.column_hnf_key(s)] = (s, slope, idx)
    all_spans = dict(frontier)
    for k in range(2, r):
        new_frontier = {}
        for key, (s, _, last_idx) in frontier.items():
            # each candidate subset is visited once: extend only with
            # generators of larger index than those already used
            for idx in range(last_idx + 1, len(cands)):
                v = cands[idx]
                if linalg.in_colspace(s, [Fraction(c) for c in v]):
                    continue
                ext = [row + [v[i]] for i, row in enumerate(s)]
                sat = linalg.saturation_int(ext)
                nk = linalg.column_hnf_key(sat)
                prev = new_frontier.get(nk) or all_spans.get(nk)
                if prev is not None:
                    if idx < prev[2]:
                        entry = (prev[0], prev[1], idx)
                        new_frontier[nk] = entry
                        all_spans[nk] = entry
                    continue
                slope = _sub_slope(gram, linalg.columns(sat), delta)
                new_frontier[nk] = (sat, slope, idx)
        if len(new_frontier) > beam:
            ranked = sorted(
                new_frontier.items(),
                key=lambda kv: float(kv[1][1]),
                reverse=True,
            )[:beam]
            new_frontier = dict(ranked)
        all_spans.update(new_frontier)
        frontier = new_frontier
        if not frontier:
            break
    mu_max = best_slope
    for s, slope, _ in all_spans.values():
        if slope > mu_max:
            mu_max = slope
    maximizers = [
        (s, slope) for s, slope, _ in all_spans.values() if slope == mu_max
    ]
    if mu_max == best_slope and (
        not maximizers or all(linalg.num_cols(s) < r for s, _ in maximizers)
    ):
        maximizers.append((linalg.identity(r, one=1), best_slope))
    # the maximal destabilizing sublattice contains every maximizer; take
    # the saturated union and keep it only if its slope is still maximal
    if len(maximizers) > 1:
        union_cols = []
        for s, _ in maximizers:
            union_cols.extend(linalg.columns(s))
        union = linalg.saturation(
            linalg.from_columns(union_cols, nrows=r)
        )
        union_slope = _sub_slope(gram, linalg.columns(union), delta)
        if union_slope == mu_max:
            return union, mu_max
    # otherwise the largest-rank maximizer
    s, slope = max(maximizers, key=lambda t: linalg.num_cols(t[0]))
    return linalg.column_hnf(s), slope


def _completion(e1):
    """Unimodular extension: returns (p1, c) with [p1|c] a basis of Z^r and
    p1 spanning the same saturated lattice as e1."""
    h, w = linalg.row_hnf(e1)
    k = linalg.num_cols(e1)
    p = linalg.inverse([[Fraction(x) for x in row] for row in w])
    p_int = [[int(x) for x in row] for row in p]
    p1 = [row[:k] for row in p_int]
    c = [row[k:] for row in p_int]
    return p1, c


def _hn_members(gram, delta, kappa, budget, beam):
    r = len(gram)
    e1, mu1 = _max_slope_subspace(gram, delta, kappa, budget, beam=beam)
    k = linalg.num_cols(e1)
    if k == r:
        return [linalg.identity(r, one=1)], [mu1]
    p1, c = _completion(e1)
    p = [r1 + r2 for r1, r2 in zip(p1, c)]
    gp = linalg.matmul(
        linalg.matmul(linalg.transpose(linalg.frac_matrix(p)), gram),
        linalg.frac_matrix(p),
    )
    a = [row[:k] for row in gp[:k]]
    b = [row[k:] for row in gp[:k]]
    cq = [row[k:] for row in gp[k:]]
    ainv = linalg.inverse(a)
    schur_corr = linalg.matmul(
        linalg.matmul(linalg.transpose(b), ainv), b
    )
    schur = [
        [cq[i][j] - schur_corr[i][j] for j in range(r - k)] for i in range(r - k)
    ]
    sub_members, sub_slopes = _hn_members(schur, delta, kappa, budget, beam)
    members = [e1]
    for m in sub_members:
        lift_cols = linalg.columns(e1) + linalg.columns(
            linalg.matmul(c, m)
        )
        lifted = linalg.column_hnf(
            linalg.from_columns(lift_cols, nrows=r)
        )
        members.append(lifted)
    return members, [mu1] + sub_slopes


def slope_invariants(
    lattice: NormedLattice,
    kappa: int = 2,
    budget: int = DEFAULT_NODE_BUDGET,
    beam: int = 64,
):
    """(slope, mu_max, mu_min, HNFlag) for a Euclidean lattice.

    The destabilizing-sublattice search is a bounded-radius heuristic; the
    result is guarded by exact strict monotonicity of the slopes, exact
    degree additivity, and the duality identity mu_min = -mu_max(dual).
    Guard failure escalates the radius and finally raises
    UnverifiedCertificate.
    """
    if not lattice.is_euclidean:
        raise UnsupportedNorm("slopes require a Euclidean norm")
    gram = lattice.norm.gram
    delta = lattice.base.degree_delta
    r = lattice.rank
    degree = arakelov_degree(lattice)
    total_slope = ExactLog(degree.q, degree.m * delta * r)
    last_error = None
    for kap in (kappa, kappa + 1, kappa + 2):
        members, slopes = _hn_members(gram, delta, kap, budget, beam)
        ok = all(s1 > s2 for s1, s2 in zip(slopes, slopes[1:]))
        if ok:
            ranks = [linalg.num_cols(m) for m in members]
            acc = None
            for (s, rk, prev_rk) in zip(slopes, ranks, [0] + ranks[:-1]):
                piece = s * (delta * (rk - prev_rk))
                acc = piece if acc is None else acc + piece
            if acc != degree:
                ok = False
                last_error = "degree additivity failed"
        if ok:
            dual_gram = linalg.inverse(gram)
            _, dual_mu_max = _max_slope_subspace(
                dual_gram, delta, kap, budget, beam=beam
            )
            if slopes[-1] != -dual_mu_max:
                ok = False
                last_error = "duality cross-check failed"
        else:
            last_error = last_error or "slopes not strictly decreasing"
        if ok:
            flag = HNFlag(members, slopes)
            return total_slope, slopes[0], slopes[-1], flag
    raise UnverifiedCertificate(
        f"slope filtration not certified (radius escalation exhausted): {last_error}"
    )


def slope_filtration(
    lattice: NormedLattice,
    kappa: int = 2,
    budget: int = DEFAULT_NODE_BUDGET,
) -> FilteredSpace:
    """Filtration whose level-t member is the largest sublattice of minimal
    slope >= t: members are the HN flag members, exit levels its slopes."""
    _, _, _, flag = slope_invariants(lattice, kappa, budget)
    entries = []
    # flag members have increasing rank and decreasing slopes; the member
    # of rank r exits at the smallest slope, so reverse for increasing exits
    for member, slope in zip(reversed(flag.members), reversed(flag.slopes)):
        entries.append((slope, linalg.frac_matrix(member)))
    return FilteredSpace(lattice.rank, entries)


def dual(lattice: NormedLattice) -> NormedLattice:
    if not lattice.is_euclidean:
        raise UnsupportedNorm("dual implemented for Euclidean norms")
    return NormedLattice.euclidean(linalg.inverse(lattice.norm.gram), lattice.base)


# ---------------------------------------------------------------------------
# certified eigenvalue enclosures, heights, distortion


class Enclosure:
    """Two-sided bound lo <= value <= hi; endpoints exact when possible."""

    __slots__ = ("lo", "hi")

    def __init__(self, lo, hi):
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    def __setattr__(self, *args):
        raise AttributeError("Enclosure is immutable")

    @property
    def mid(self) -> float:
        return (as_float(self.lo) + as_float(self.hi)) / 2

    @property
    def width(self) -> float:
        return as_float(self.hi) - as_float(self.lo)

    def __repr__(self):
        return f"Enclosure({as_float(self.lo):.12g}, {as_float(self.hi):.12g})"


def _rayleigh(b, a, x) -> Fraction:
    num = sum(
        xi * s for xi, s in zip(x, linalg.matvec(b, x))
    )
    den = sum(xi * s for xi, s in zip(x, linalg.matvec(a, x)))
    return Fraction(num) / den


def eig_max_enclosure(b, a, rel_tol: float = 1e-10) -> Enclosure:
    """Certified enclosure of the largest generalized eigenvalue of (b, a).

    a must be positive definite, b positive semidefinite, both symmetric
    rational.  Lower bound: exact Rayleigh quotient at a rationalized
    numeric eigenvector.  Upper bound: exact positive-definiteness test of
    rho*a - b, tightened by bisection.
    """
    import numpy as np

    r = len(a)
    af = np.array([[float(x) for x in row] for row in a])
    bf = np.array([[float(x) for x in row] for row in b])
    lchol = np.linalg.cholesky(af)
    li = np.linalg.inv(lchol)
    core = li @ bf @ li.T
    vals, vecs = np.linalg.eigh((core + core.T) / 2)
    v = vecs[:, -1]
    x_num = np.linalg.solve(lchol.T, v)
    scale = max(abs(t) for t in x_num) or 1.0
    candidates = [
        [Fraction(t / scale).limit_denominator(10**9) for t in x_num]
    ]
    for j in range(r):
        candidates.append(
            [Fraction(1) if i == j else Fraction(0) for i in range(r)]
        )
    lo = None
    a_fr = linalg.frac_matrix(a)
    b_fr = linalg.frac_matrix(b)
    for x in candidates:
        if all(t == 0 for t in x):
            continue
        val = _rayleigh(b_fr, a_fr, x)
        if lo is None or val > lo:
            lo = val

    def psd_above(rho: Fraction) -> bool:
        m = [
            [rho * a_fr[i][j] - b_fr[i][j] for j in range(r)] for i in range(r)
        ]
        return is_positive_definite(m)

    eps = Fraction(1, 10**12)
    hi = lo * (1 + eps) + eps
    while not psd_above(hi):
        eps *= 16
        hi = lo * (1 + eps) + eps
        if eps > 10**9:
            raise ArithmeticError("failed to bracket the largest eigenvalue")
    floor = lo
    for _ in range(80):
        if as_float(hi - floor) <= rel_tol * max(1.0, abs(as_float(lo))):
            break
        mid = (floor + hi) / 2
        if psd_above(mid):
            hi = mid
        else:
            floor = mid
    return Enclosure(lo, hi)


def _content(m) -> Fraction:
    """Rational gcd of the matrix entries (0 for the zero matrix)."""
    den_lcm = 1
    for row in m:
        for x in row:
            f = Fraction(x)
            if f != 0:
                den_lcm = den_lcm // math.gcd(den_lcm, f.denominator) * f.denominator
    num_gcd = 0
    for row in m:
        for x in row:
            f = Fraction(x)
            if f != 0:
                num_gcd = math.gcd(num_gcd, abs(f.numerator) * (den_lcm // f.denominator))
    return Fraction(num_gcd, den_lcm)


def height_of_map(src: NormedLattice, dst: NormedLattice, m) -> Enclosure:
    """Height of the linear map: finite part - log(content) plus the log of
    the archimedean operator norm, returned as a certified enclosure whose
    endpoints are exact logs of rationals in the Euclidean/Euclidean case.
    """
    m = linalg.frac_matrix(m)
    if len(m) != dst.rank or linalg.num_cols(m) != src.rank:
        raise ValueError("map dimensions inconsistent with lattices")
    content = _content(m)
    if content == 0:
        raise ValueError("height of the zero map is undefined")
    delta = src.base.degree_delta
    finite = -ExactLog(content)
    if src.is_euclidean and dst.is_euclidean:
        b = linalg.matmul(
            linalg.matmul(linalg.transpose(m), dst.norm.gram), m
        )
        a = src.norm.gram
        if src.rank == 1:
            lam = Fraction(b[0][0]) / a[0][0]
            arch = ExactLog(lam, 2)
            total = (finite + arch) / delta
            return Enclosure(total, total)
        enc = eig_max_enclosure(b, a)
        lo = (finite + ExactLog(enc.lo, 2)) / delta
        hi = (finite + ExactLog(enc.hi, 2)) / delta
        return Enclosure(lo, hi)
    if isinstance(src.norm, DiagonalMaxNorm) and isinstance(
        dst.norm, DiagonalMaxNorm
    ):
        cs = src.norm.log_weights
        cd = dst.norm.log_weights
        val = max(
            -as_float(cd[i])
            + math.log(
                sum(abs(float(m[i][j])) * math.exp(as_float(cs[j]))
                    for j in range(src.rank))
            )
            for i in range(dst.rank)
        )
        total = (float(finite) + val) / delta
        return Enclosure(total, total)
    raise UnsupportedNorm("height needs Euclidean or diagonal-max norms")


def distortion(l1: NormedLattice, l2: NormedLattice) -> Enclosure:
    """sup over nonzero x of |log|x|_1 - log|x|_2|, as an enclosure."""
    if l1.rank != l2.rank:
        raise ValueError("distortion needs equal ranks")
    r = l1.rank
    n1, n2 = l1.norm, l2.norm
    if isinstance(n1, DiagonalMaxNorm) and isinstance(n2, DiagonalMaxNorm):
        d = max(
            abs(as_float(a) - as_float(b))
            for a, b in zip(n1.log_weights, n2.log_weights)
        )
        exact = all(
            isinstance(a, Fraction) and isinstance(b, Fraction)
            for a, b in zip(n1.log_weights, n2.log_weights)
        )
        if exact:
            d = max(
                abs(a - b) for a, b in zip(n1.log_weights, n2.log_weights)
            )
        return Enclosure(d, d)
    if isinstance(n1, EuclideanNorm) and isinstance(n2, EuclideanNorm):
        e12 = eig_max_enclosure(n1.gram, n2.gram)
        e21 = eig_max_enclosure(n2.gram, n1.gram)
        lo = ExactLog(max(e12.lo, e21.lo), 2)
        hi = ExactLog(max(e12.hi, e21.hi), 2)
        return Enclosure(lo, hi)
    # mixed Euclidean / max norm: sampled lower bound, John-type upper bound
    if isinstance(n1, EuclideanNorm):
        euc, other = n1, n2
    elif isinstance(n2, EuclideanNorm):
        euc, other = n2, n1
    else:
        raise UnsupportedNorm("distortion needs Euclidean or diagonal norms")
    if not isinstance(other, DiagonalMaxNorm):
        raise UnsupportedNorm("mixed distortion supports diagonal-max only")
    cs = [as_float(c) for c in other.log_weights]

    def ratio(x):
        q = euc.squared_norm(x)
        log_euc = 0.5 * math.log(float(q))
        log_max = max(-c + math.log(abs(xi)) for c, xi in zip(cs, x) if xi != 0)
        return abs(log_euc - log_max)

    samples = [
        [1 if i == j else 0 for i in range(r)] for j in range(r)
    ]
    if r <= 10:
        samples.extend(
            list(s) for s in itertools.product([-1, 1], repeat=r)
        )
    lower = max(ratio(x) for x in samples)
    # |x|_max <= |x|_{E_c} <= sqrt(r)|x|_max for E_c = diag(e^{-2c})
    ec = [
        [math.exp(-2 * cs[i]) if i == j else 0.0 for j in range(r)]
        for i in range(r)
    ]
    import numpy as np

    gf = np.array([[float(x) for x in row] for row in euc.gram])
    ef = np.array(ec)
    vals = np.linalg.eigvalsh(np.linalg.solve(ef, gf))
    d_euc = 0.5 * max(abs(math.log(v)) for v in vals)
    upper = d_euc + 0.5 * math.log(r) + 1e-9
    upper = max(upper, lower)
    return Enclosure(lower, upper)


# ---------------------------------------------------------------------------
# the inequality audit


def _cmp_levels(t, level) -> bool:
    """t <= level with exact comparison when both sides allow it."""
    try:
        return t <= level
    except TypeError:
        return as_float(t) <= as_float(level)


def _member_at_exact(fs: FilteredSpace, t):
    for level, basis in fs.flag:
        if _cmp_levels(t, level):
            return basis
    return [[] for _ in range(fs.ambient_dim)]


def _included(inner, fs: FilteredSpace, level) -> bool:
    target = _member_at_exact(fs, level)
    return all(
        linalg.in_colspace(target, col) for col in linalg.columns(inner)
    )


def audit_inequalities(
    lattice: NormedLattice,
    companion: NormedLattice | None = None,
    companion_map=None,
    kappa: int = 2,
    budget: int = DEFAULT_NODE_BUDGET,
) -> AuditReport:
    """Audit the explicit slope/minima inequalities on one lattice.

    Entries: the transference bound relating e_min and the dual's e_max;
    both two-sided bounds between e_max and mu_max; the slope inequality
    under a map to the companion (identity endomorphism by default); the
    two filtration inclusion bounds (minimum filtration vs slope
    filtration, shift constants alpha and beta); and the lower bound on
    e_min in terms of mu_min.  Margins are exact whenever the base field
    constants vanish.
    """
    if not lattice.is_euclidean:
        raise UnsupportedNorm("the audit requires a Euclidean lattice")
    report = AuditReport()
    r = lattice.rank
    delta = lattice.base.degree_delta
    log_disc = lattice.base.log_disc
    minima = successive_minima(lattice, budget)
    e_max, e_min = minima[0], minima[-1]

    def finish(id, lhs, rhs, geq=True):
        """lhs >= rhs (or <=) with margin lhs-rhs (rhs-lhs)."""
        margin = lhs - rhs if geq else rhs - lhs
        ok = margin >= 0
        report.add(
            AuditEntry(
                id=id,
                lhs=as_float(lhs),
                rhs=as_float(rhs),
                margin=as_float(margin),
                verdict=PASS if ok else FAIL,
            )
        )

    # transference: e_min + e_max(dual) >= -log(3r/2)
    dual_minima = successive_minima(dual(lattice), budget)
    finish(
        "transference",
        e_min + dual_minima[0],
        ExactLog(Fraction(2, 3 * r)),
    )

    try:
        _, mu_max, mu_min, _ = slope_invariants(lattice, kappa, budget)
        fs_slope = slope_filtration(lattice, kappa, budget)
    except (UnverifiedCertificate, BudgetExhausted) as exc:
        for id in (
            "minima-vs-slope-upper",
            "minima-vs-slope-lower",
            "slope-inequality",
            "alpha-inclusion",
            "beta-inclusion",
            "min-slope-lower-bound",
        ):
            report.add(
                AuditEntry(id, None, None, None, UNVERIFIED, detail=str(exc))
            )
        return report

    # e_max <= mu_max - (1/2) log delta
    if delta == 1:
        finish("minima-vs-slope-upper", e_max, mu_max, geq=False)
        rhs_lower = mu_max - ExactLog(delta * r, 2)
    else:
        finish(
            "minima-vs-slope-upper",
            as_float(e_max),
            as_float(mu_max) - 0.5 * math.log(delta),
            geq=False,
        )
        rhs_lower = (
            as_float(mu_max) - 0.5 * math.log(delta * r) - log_disc / (2 * delta)
        )
    # e_max >= mu_max - (1/2) log(delta r) - log_disc/(2 delta)
    finish("minima-vs-slope-lower", e_max, rhs_lower)

    # slope inequality under a companion map
    if companion is None:
        comp = lattice
        cmap = linalg.identity(r, one=1)
    else:
        comp = companion
        cmap = companion_map if companion_map is not None else linalg.identity(r, one=1)
    try:
        h = height_of_map(lattice, comp, cmap)
        _, comp_mu_max, _, _ = (
            (None, mu_max, None, None)
            if comp is lattice
            else slope_invariants(comp, kappa, budget)
        )
        rhs_lo = comp_mu_max + h.lo
        rhs_hi = comp_mu_max + h.hi
        if mu_max <= rhs_lo:
            verdict, margin = PASS, as_float(rhs_lo) - as_float(mu_max)
        elif mu_max > rhs_hi:
            verdict, margin = FAIL, as_float(rhs_hi) - as_float(mu_max)
        else:
            verdict, margin = UNVERIFIED, None
        report.add(
            AuditEntry(
                "slope-inequality",
                as_float(mu_max),
                (as_float(rhs_lo), as_float(rhs_hi)),
                margin,
                verdict,
            )
        )
    except (UnverifiedCertificate, BudgetExhausted, ArithmeticError) as exc:
        report.add(
            AuditEntry("slope-inequality", None, None, None, UNVERIFIED, str(exc))
        )

    # distortion to the companion metric (zero against itself)
    if companion is None or companion is lattice:
        d_hi = ExactLog.zero()
    else:
        d_hi = distortion(lattice, companion).hi
        if not isinstance(d_hi, ExactLog):
            d_hi = float(d_hi)

    fs_min = minimum_filtration(lattice, budget)

    # alpha-inclusion: F^M_t inside F^S_{t - alpha}, alpha = (1/2)log r + D
    alpha = ExactLog(r, 2) + d_hi
    ok = True
    worst = None
    for t, basis in fs_min.flag:
        shifted = t - alpha if isinstance(alpha, ExactLog) else as_float(t) - alpha
        if not _included(basis, fs_slope, shifted):
            ok = False
        for col in linalg.columns(basis):
            lam = fs_slope.lambda_of(col)
            slack = as_float(lam) - as_float(shifted)
            worst = slack if worst is None else min(worst, slack)
    report.add(
        AuditEntry(
            "alpha-inclusion",
            "minimum filtration",
            f"slope filtration shifted by {as_float(alpha):.6g}",
            worst,
            PASS if ok else FAIL,
        )
    )

    # beta-inclusion: F^S_t inside F^M_{t - beta},
    # beta = D + log_disc + (1/2)log delta + log(3/2) + log r
    beta_exact = ExactLog(Fraction(3 * r, 2)) + d_hi
    if delta != 1 or log_disc != 0:
        beta = (
            as_float(d_hi)
            + log_disc
            + 0.5 * math.log(delta)
            + math.log(1.5)
            + math.log(r)
        )
    else:
        beta = beta_exact
    ok = True
    worst = None
    for t, basis in fs_slope.flag:
        shifted = t - beta if isinstance(beta, ExactLog) else as_float(t) - beta
        if not _included(basis, fs_min, shifted):
            ok = False
        for col in linalg.columns(basis):
            lam = fs_min.lambda_of(col)
            slack = as_float(lam) - as_float(shifted)
            worst = slack if worst is None else min(worst, slack)
    report.add(
        AuditEntry(
            "beta-inclusion",
            "slope filtration",
            f"minimum filtration shifted by {as_float(beta):.6g}",
            worst,
            PASS if ok else FAIL,
        )
    )

    # e_min >= mu_min - log_disc - (1/2)log delta - log(3/2) - log r
    if delta == 1 and log_disc == 0:
        finish(
            "min-slope-lower-bound",
            e_min,
            mu_min - ExactLog(Fraction(3 * r, 2)),
        )
    else:
        finish(
            "min-slope-lower-bound",
            as_float(e_min),
            as_float(mu_min)
            - log_disc
            - 0.5 * math.log(delta)
            - math.log(1.5)
            - math.log(r),
        )
    return report
