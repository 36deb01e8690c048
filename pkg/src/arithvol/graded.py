"""Graded linear series: degree-indexed normed lattices with multiplication.

Two models are supported.  The workhorse is the weighted monomial model: the
degree-n component is spanned by monomials of total degree n in N+1
variables, the norm is diagonal-max with log-weight c_a = <w_lin, a> + w0*n,
and multiplication is exponent addition (so weights are exactly additive).
Subseries by weight threshold (small sections) and subalgebras generated in
a single degree (n-fold sumsets of exponent sets) stay in the model.  An
explicit model stores one lattice per degree together with multiplication
matrices on basis pairs.
"""

from __future__ import annotations

import math
from fractions import Fraction

from . import linalg
from .exactlog import as_float
from .lattice import (
    DEFAULT_NODE_BUDGET,
    NormedLattice,
    RATIONAL_FIELD,
    h0 as lattice_h0,
    minimum_filtration,
)
from .measure import DiracMixture, PiecewiseLinear, dominates
from .report import PASS, FAIL, HYPOTHESIS_FAILED, AuditEntry, AuditReport


def compositions(n: int, parts: int):
    """All tuples of `parts` nonnegative integers summing to n, lex order."""
    if parts == 1:
        yield (n,)
        return
    for first in range(n + 1):
        for rest in compositions(n - first, parts - 1):
            yield (first,) + rest


def sumset(a, b):
    return {tuple(x + y for x, y in zip(u, v)) for u in a for v in b}


def nfold_sumset(exponents, n: int):
    """n-fold Minkowski sum of a set of exponent tuples (doubling trick)."""
    if n < 1:
        raise ValueError("need n >= 1")
    base = set(map(tuple, exponents))
    result = None
    power = base
    k = n
    while k:
        if k & 1:
            result = power if result is None else sumset(result, power)
        k >>= 1
        if k:
            power = sumset(power, power)
    return result


# ---------------------------------------------------------------------------
# selections (which monomials of degree n belong to the series)


class AllSelection:
    def exponents(self, series, n: int):
        return list(compositions(n, series.projective_dim + 1))

    def describe(self):
        return "all"


class ThresholdSelection:
    """Monomials of the inner selection with weight at least lam * n."""

    def __init__(self, inner, lam):
        self.inner = inner
        self.lam = Fraction(lam)

    def exponents(self, series, n: int):
        base = self.inner.exponents(series, n)
        if base is None:
            return None
        if n == 0:
            return base
        return [a for a in base if series.weight(a, n) >= self.lam * n]

    def describe(self):
        return f"threshold({self.lam}) of {self.inner.describe()}"


class SumsetSelection:
    """Degree-kp component = k-fold sumset of a degree-p exponent set."""

    def __init__(self, p: int, generators):
        self.p = int(p)
        self.generators = sorted(map(tuple, generators))
        if not self.generators:
            raise ValueError("empty generator set")

    def exponents(self, series, n: int):
        if n == 0:
            return [tuple([0] * (series.projective_dim + 1))]
        if n % self.p != 0:
            return None
        return sorted(nfold_sumset(self.generators, n // self.p))

    def describe(self):
        return f"sumset(p={self.p}, {len(self.generators)} generators)"


# ---------------------------------------------------------------------------
# the series


class GradedSeries:
    """Common interface: per-degree rank, lattice, measure and h0."""

    def rank(self, n: int) -> int:
        raise NotImplementedError

    def degree_component(self, n: int):
        raise NotImplementedError

    def measure(self, n: int) -> DiracMixture:
        raise NotImplementedError

    def h0_value(self, n: int) -> float:
        raise NotImplementedError

    def supported(self, n: int) -> bool:
        raise NotImplementedError

    def supported_degrees(self, degrees):
        return [n for n in degrees if n >= 1 and self.supported(n) and self.rank(n) > 0]

    @staticmethod
    def weighted_monomial(projective_dim, w_lin, w0=0, selection=None,
                          base=RATIONAL_FIELD):
        return WeightedMonomialSeries(projective_dim, w_lin, w0, selection, base)

    @staticmethod
    def explicit(lattices, mult=None, arithmetic_dim=1, base=RATIONAL_FIELD):
        return ExplicitSeries(lattices, mult, arithmetic_dim, base)


class WeightedMonomialSeries(GradedSeries):
    def __init__(self, projective_dim, w_lin, w0=0, selection=None,
                 base=RATIONAL_FIELD, step=1):
        self.projective_dim = int(projective_dim)
        self.w_lin = tuple(Fraction(w) for w in w_lin)
        if len(self.w_lin) != self.projective_dim + 1:
            raise ValueError("need one linear weight per variable")
        self.w0 = Fraction(w0)
        self.selection = selection if selection is not None else AllSelection()
        self.base = base
        self.step = int(step)
        # geometric dimension of the full model; the arithmetic dimension
        # adds one for the base
        self.geometric_dim = self.projective_dim
        self.arithmetic_dim = self.projective_dim + 1
        self._exp_cache: dict = {}

    def weight(self, a, n: int) -> Fraction:
        return sum(w * x for w, x in zip(self.w_lin, a)) + self.w0 * n

    def exponents(self, n: int):
        if n not in self._exp_cache:
            self._exp_cache[n] = self.selection.exponents(self, n)
        return self._exp_cache[n]

    def supported(self, n: int) -> bool:
        return self.exponents(n) is not None

    def rank(self, n: int) -> int:
        exps = self.exponents(n)
        return 0 if exps is None else len(exps)

    def weights_at(self, n: int):
        return [self.weight(a, n) for a in self.exponents(n)]

    def degree_component(self, n: int):
        exps = self.exponents(n)
        if not exps:
            return None
        return NormedLattice.diagonal_max(
            [self.weight(a, n) for a in exps], self.base
        )

    def measure(self, n: int) -> DiracMixture:
        """T_{1/n} of the minimum-filtration measure of the degree-n part."""
        exps = self.exponents(n)
        if not exps:
            return DiracMixture.zero()
        w = Fraction(1, len(exps))
        return DiracMixture([(self.weight(a, n) / n, w) for a in exps])

    def h0_value(self, n: int) -> float:
        lat = self.degree_component(n)
        return 0.0 if lat is None else float(lattice_h0(lat))

    def lambda_max(self, n: int) -> Fraction:
        return max(self.weights_at(n))

    def _derive(self, selection, step=None):
        return WeightedMonomialSeries(
            self.projective_dim, self.w_lin, self.w0, selection, self.base,
            step if step is not None else self.step,
        )

    def effective_subseries(self, lam) -> "WeightedMonomialSeries":
        """Subseries of sections of weight at least lam*n in each degree."""
        return self._derive(ThresholdSelection(self.selection, lam))

    def generated_subalgebra(self, p: int) -> "WeightedMonomialSeries":
        """Subalgebra generated by the effective part of the degree-p piece;
        components live in degrees that are multiples of p."""
        if p % self.step != 0:
            raise ValueError("p must be a supported degree")
        gens = ThresholdSelection(self.selection, 0).exponents(self, p)
        if not gens:
            raise ValueError("no effective sections in the generating degree")
        return self._derive(SumsetSelection(p, gens), step=p)

    def is_subseries_of(self, other: "WeightedMonomialSeries", n: int) -> bool:
        mine, theirs = self.exponents(n), other.exponents(n)
        if mine is None:
            return True
        if theirs is None:
            return False
        return set(mine) <= set(theirs)


class ExplicitSeries(GradedSeries):
    """Per-degree lattices plus optional multiplication matrices.

    mult[(n, m)] is a matrix with rank(n+m) rows and rank(n)*rank(m)
    columns; column i*rank(m)+j is the product of basis vectors i and j.
    """

    def __init__(self, lattices, mult=None, arithmetic_dim=1,
                 base=RATIONAL_FIELD, budget=DEFAULT_NODE_BUDGET):
        self.lattices = dict(lattices)
        self.mult = dict(mult or {})
        self.arithmetic_dim = int(arithmetic_dim)
        self.geometric_dim = max(self.arithmetic_dim - 1, 0)
        self.base = base
        self.budget = budget
        self.step = 1

    def supported(self, n: int) -> bool:
        return n in self.lattices

    def rank(self, n: int) -> int:
        lat = self.lattices.get(n)
        return 0 if lat is None else lat.rank

    def degree_component(self, n: int):
        if n not in self.lattices:
            raise KeyError(f"no degree-{n} component stored")
        return self.lattices[n]

    def measure(self, n: int) -> DiracMixture:
        lat = self.lattices.get(n)
        if lat is None:
            return DiracMixture.zero()
        return minimum_filtration(lat, self.budget).measure_of().rescale(
            Fraction(1, n)
        )

    def h0_value(self, n: int) -> float:
        lat = self.lattices.get(n)
        return 0.0 if lat is None else float(lattice_h0(lat, self.budget))

    def effective_rank(self, n: int, lam) -> int:
        """Rank of the span of sections of norm <= e^{-lam*n} (honest span
        through the minimum filtration, no monomial shortcut)."""
        lat = self.lattices.get(n)
        if lat is None:
            return 0
        fs = minimum_filtration(lat, self.budget)
        return fs.rank_at(Fraction(lam) * n)

    def image_rank(self, p: int, n: int) -> int:
        """Rank of the image of the n-fold product map on the degree-p part."""
        if n < 1:
            raise ValueError("need n >= 1")
        rp = self.rank(p)
        basis = linalg.identity(rp)
        degree = p
        for _ in range(n - 1):
            key = (degree, p)
            if key not in self.mult:
                raise KeyError(f"no multiplication map for degrees {key}")
            m = self.mult[key]
            prod_cols = []
            for col in linalg.columns(basis):
                for j in range(rp):
                    vec = [Fraction(0)] * (len(col) * rp)
                    for i, ci in enumerate(col):
                        vec[i * rp + j] = ci
                    prod_cols.append(linalg.matvec(m, vec))
            basis = linalg.colspace_basis(
                linalg.from_columns(prod_cols, nrows=len(m))
            )
            degree += p
        return linalg.num_cols(basis)


# ---------------------------------------------------------------------------
# diagnostics and experiments


def approximation_ratio(series, p: int, n: int, ambient=None) -> Fraction:
    """Rank of the image of the n-fold product of the degree-p part inside
    the degree-np part, over the rank of that component (of `ambient` when
    given, letting a subseries be measured against a larger series)."""
    target = ambient if ambient is not None else series
    denom = target.rank(n * p)
    if denom == 0:
        raise ZeroDivisionError("empty target component")
    if isinstance(series, WeightedMonomialSeries):
        gens = series.exponents(p)
        if not gens:
            raise ValueError("empty degree-p component")
        image = nfold_sumset(gens, n)
        target_exps = target.exponents(n * p)
        covered = image & set(target_exps)
        return Fraction(len(covered), denom)
    return Fraction(series.image_rank(p, n), denom)


def quasi_filtered_audit(series, f=None, degree_pairs=((1, 1), (2, 3), (5, 5)),
                         weight_override=None) -> AuditReport:
    """Check superadditivity of weights under products up to the penalty f:
    weight(a+b, n+m) >= weight(a, n) + weight(b, m) - f(n) - f(m)."""
    if not isinstance(series, WeightedMonomialSeries):
        raise TypeError("the product audit runs on monomial models")
    f = f or (lambda n: 0)
    w = weight_override or series.weight
    report = AuditReport()
    for n, m in degree_pairs:
        exps_n, exps_m = series.exponents(n), series.exponents(m)
        if not exps_n or not exps_m:
            continue
        worst = None
        for a in exps_n:
            for b in exps_m:
                prod = tuple(x + y for x, y in zip(a, b))
                margin = (
                    w(prod, n + m) - w(a, n) - w(b, m)
                    + Fraction(f(n)) + Fraction(f(m))
                )
                worst = margin if worst is None else min(worst, margin)
        report.add(
            AuditEntry(
                id=f"product-superadditivity-{n}x{m}",
                lhs="weight of product",
                rhs="sum of weights minus penalties",
                margin=worst,
                verdict=PASS if worst >= 0 else FAIL,
            )
        )
    return report


class AsymptoticTrace:
    """Per-degree records of rank, h0, rescaled measure and top level."""

    def __init__(self, records, reference=None):
        self.records = records
        self.reference = reference

    @property
    def limit_measure(self) -> DiracMixture:
        return self.records[-1]["measure"]

    def to_csv(self) -> str:
        lines = ["n,rank,h0,h0_normalized,lambda_max_over_n,cdf_distance_to_reference"]
        for rec in self.records:
            dist = rec.get("cdf_distance_to_reference")
            lines.append(
                f"{rec['n']},{rec['rank']},{rec['h0']:.12g},"
                f"{rec['h0_normalized']:.12g},{rec['lambda_max_over_n']:.12g},"
                + ("" if dist is None else f"{dist:.12g}")
            )
        return "\n".join(lines) + "\n"


def asymptotic_trace(series, degrees, reference=None) -> AsymptoticTrace:
    """reference: optional callable n -> DiracMixture used for CDF distances."""
    from .measure import cdf_distance

    records = []
    d = series.arithmetic_dim
    for n in series.supported_degrees(degrees):
        rank = series.rank(n)
        h0v = series.h0_value(n)
        nu = series.measure(n)
        rec = {
            "n": n,
            "rank": rank,
            "h0": h0v,
            "h0_normalized": h0v / (n**d / math.factorial(d)),
            "lambda_max_over_n": max(as_float(x) for x in nu.locations()),
            "measure": nu,
        }
        if reference is not None:
            rec["cdf_distance_to_reference"] = cdf_distance(nu, reference(n))
        records.append(rec)
    if not records:
        raise ValueError("no supported degrees with nonzero rank")
    return AsymptoticTrace(records, reference)


def volume_estimate(series, degrees):
    """(d(B), [(n, vol_n)], last vol_n): d(B) is the nearest integer to the
    log-log slope of the rank sequence over the top half of the degrees."""
    ns = series.supported_degrees(degrees)
    if len(ns) < 2:
        raise ValueError("need at least two degrees for the dimension fit")
    ranks = {n: series.rank(n) for n in ns}
    top = ns[len(ns) // 2 :]
    if len(top) < 2:
        top = ns[-2:]
    xs = [math.log(n) for n in top]
    ys = [math.log(ranks[n]) for n in top]
    xbar, ybar = sum(xs) / len(xs), sum(ys) / len(ys)
    denom = sum((x - xbar) ** 2 for x in xs)
    slope = sum((x - xbar) * (y - ybar) for x, y in zip(xs, ys)) / denom
    d = round(slope)
    if abs(slope - d) > 0.25:
        raise ValueError(f"rank growth fit {slope:.3f} is not near an integer")
    if d != series.geometric_dim:
        raise ValueError(
            f"fitted dimension {d} disagrees with the model dimension "
            f"{series.geometric_dim}"
        )
    seq = [(n, ranks[n] / (n**d / math.factorial(d))) for n in ns]
    return d, seq, seq[-1][1]


def arithmetic_volume_estimate(series, degrees):
    """([(n, vol_hat_n)], last value) with vol_hat_n = h0 / (n^d / d!)."""
    ns = series.supported_degrees(degrees)
    if not ns:
        raise ValueError("no supported degrees")
    d = series.arithmetic_dim
    seq = [
        (n, series.h0_value(n) / (n**d / math.factorial(d))) for n in ns
    ]
    return seq, seq[-1][1]


def volume_identity_check(series, degrees, tol: float = 0.02) -> AuditEntry:
    """Compare the integral of max{x,0} against vol_hat/(delta*d*vol)."""
    _, _, vol = volume_estimate(series, degrees)
    _, vol_hat = arithmetic_volume_estimate(series, degrees)
    ns = series.supported_degrees(degrees)
    nu = series.measure(ns[-1])
    lhs = nu.integrate(PiecewiseLinear.relu())
    delta = series.base.degree_delta
    d = series.arithmetic_dim
    rhs = vol_hat / (delta * d * vol)
    ratio = lhs / rhs if rhs != 0 else float("inf")
    ok = abs(ratio - 1) <= tol
    return AuditEntry(
        id="volume-identity",
        lhs=lhs,
        rhs=rhs,
        margin=tol - abs(ratio - 1),
        verdict=PASS if ok else FAIL,
        detail=f"ratio={ratio:.6f}",
    )


def fujita_experiment(series, p_list, max_degree: int, tol: float = 0.03):
    """Compare vol_hat of the single-degree-generated subalgebras against
    the effective series; returns a dict report."""
    effective = series.effective_subseries(0)
    eff_degrees = [n for n in range(1, max_degree + 1)]
    _, baseline = arithmetic_volume_estimate(
        effective, eff_degrees[-1:]
    )
    rows = []
    for p in p_list:
        sub = series.generated_subalgebra(p)
        top = (max_degree // p) * p
        _, value = arithmetic_volume_estimate(sub, [top])
        rows.append(
            {
                "p": p,
                "degree": top,
                "vol_hat": value,
                "ratio": value / baseline if baseline else float("inf"),
                "within_tol": abs(value - baseline) <= tol * abs(baseline),
            }
        )
    return {
        "baseline_vol_hat": baseline,
        "baseline_degree": max_degree,
        "rows": rows,
        "sup": max(r["vol_hat"] for r in rows),
    }


def truncation_comparison(series, sub, xs, degree: int) -> AuditReport:
    """Exact finite-degree tail inequalities for a subseries: the number of
    degree-n sections of the subseries with weight >= x*n never exceeds the
    count in the full series."""
    report = AuditReport()
    n = degree
    while n >= 1 and (not sub.supported(n) or sub.rank(n) == 0):
        n -= 1
    if n < 1:
        raise ValueError("subseries has no nonzero component up to the degree")
    if isinstance(sub, WeightedMonomialSeries) and isinstance(
        series, WeightedMonomialSeries
    ):
        if not sub.is_subseries_of(series, n):
            raise ValueError("not a subseries: selection is not included")
        for x in xs:
            x = Fraction(x)
            lhs = sum(1 for a in sub.exponents(n) if sub.weight(a, n) >= x * n)
            rhs = sum(
                1 for a in series.exponents(n) if series.weight(a, n) >= x * n
            )
            report.add(
                AuditEntry(
                    id=f"rank-tail-x={x}",
                    lhs=lhs,
                    rhs=rhs,
                    margin=rhs - lhs,
                    verdict=PASS if lhs <= rhs else FAIL,
                    detail=f"degree={n}",
                )
            )
        return report
    raise TypeError("truncation comparison runs on monomial models")


def metric_comparison_experiment(series, perturbations, phi=None) -> AuditReport:
    """Finite-level measure domination under weight increases.

    Each perturbation is (degree m, eta) with eta(a) a nonnegative weight
    increment; increasing weights raises every section's level, so the
    perturbed measure must dominate the original one and the integral of
    any increasing phi must not decrease.  Nonnegativity is checked first;
    violations are reported as hypothesis failures.
    """
    if not isinstance(series, WeightedMonomialSeries):
        raise TypeError("the perturbation experiment runs on monomial models")
    phi = phi or PiecewiseLinear.min_with(10)
    report = AuditReport()
    for idx, (m, eta) in enumerate(perturbations):
        exps = series.exponents(m)
        if not exps:
            continue
        increments = [Fraction(eta(a)) for a in exps]
        entry_id = f"perturbation-{idx}-degree-{m}"
        if any(inc < 0 for inc in increments):
            report.add(
                AuditEntry(entry_id, None, None, None, HYPOTHESIS_FAILED,
                           detail="negative weight increment"))
            continue
        w = Fraction(1, len(exps))
        nu = series.measure(m)
        nu_pert = DiracMixture(
            [((series.weight(a, m) + inc) / m, w)
             for a, inc in zip(exps, increments)]
        )
        order = dominates(nu_pert, nu)
        lhs = nu_pert.integrate(phi)
        rhs = nu.integrate(phi)
        ok = order in ("first", "equal")
        report.add(
            AuditEntry(
                entry_id,
                lhs,
                rhs,
                lhs - rhs,
                PASS if ok and lhs >= rhs - 1e-12 else FAIL,
                detail=f"order={order}",
            )
        )
    return report
