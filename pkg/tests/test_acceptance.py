"""End-to-end acceptance checks, one per numbered criterion.

Each test prints a single summary line so the pass/fail state of every
criterion is visible in the captured output.
"""

import itertools
import math
import random
import time
from fractions import Fraction

import pytest

from arithvol import linalg
from arithvol.exactlog import ExactLog, as_float
from arithvol.filtration import check_exact_sequence
from arithvol.graded import (
    arithmetic_volume_estimate,
    fujita_experiment,
    metric_comparison_experiment,
    truncation_comparison,
    volume_identity_check,
)
from arithvol.lattice import (
    NormedLattice,
    audit_inequalities,
    h0,
    is_positive_definite,
    slope_filtration,
    slope_invariants,
)
from arithvol.measure import DiracMixture, PiecewiseLinear, cdf_distance
from arithvol.models import (
    ModelSpec,
    build,
    oracle,
    random_filtered_space,
    random_subspace,
)
from arithvol.report import PASS

HALF = Fraction(1, 2)


def announce(number, ok, detail):
    state = "PASS" if ok else "FAIL"
    print(f"ACCEPTANCE {number}: {state} - {detail}")
    assert ok, detail


def random_pd_gram(rank, bound, rng):
    while True:
        g = [[0] * rank for _ in range(rank)]
        for i in range(rank):
            for j in range(i, rank):
                g[i][j] = g[j][i] = rng.randint(-bound, bound)
        if is_positive_definite(g):
            return g


def qform(gram, v):
    gv = linalg.matvec(gram, [Fraction(x) for x in v])
    return sum(Fraction(a) * b for a, b in zip(v, gv))


def primitive_box(dim, bound):
    seen = set()
    out = []
    for v in itertools.product(range(-bound, bound + 1), repeat=dim):
        if all(x == 0 for x in v):
            continue
        p = tuple(linalg.primitive_vector(list(v)))
        if p not in seen:
            seen.add(p)
            out.append(list(p))
    return out


def oracle_mu_max(gram, bound):
    """Brute-force max slope over lines, hyperplanes and the full lattice."""
    r = len(gram)
    cands = [
        ExactLog(Fraction(1) / qform(gram, v), 2) for v in primitive_box(r, bound)
    ]
    detg = linalg.det(gram)
    if r == 3:
        ginv = linalg.inverse(gram)
        for w in primitive_box(r, bound):
            cands.append(ExactLog(Fraction(1) / (detg * qform(ginv, w)), 4))
    cands.append(ExactLog(Fraction(1) / detg, 2 * r))
    return max(cands)


def test_acceptance_1_exactness_suite():
    start = time.monotonic()
    rng = random.Random(1001)
    for _ in range(100):
        dim = rng.randint(1, 6)
        fs = random_filtered_space(dim, rng)
        v = random_subspace(dim, rng)
        entry = check_exact_sequence(
            fs.induced_sub(v), fs, fs.induced_quotient(v)
        )
        assert entry.verdict == PASS
    worst_slack = None
    for _ in range(100):
        dim = rng.randint(2, 6)
        fs = random_filtered_space(dim, rng)
        v = random_subspace(dim, rng, max_rank=dim)
        k = linalg.num_cols(v)
        if k == 0:
            v = linalg.identity(dim)
            k = dim
        lo = rng.randint(-24, 0)
        hi = rng.randint(1, 24)
        h = PiecewiseLinear([lo, hi], lo, [0, 1, 0])
        sup = float(h.sup_norm_on(-25, 25))
        eps = 1 - k / dim
        diff = abs(
            fs.induced_sub(v).measure_of().integrate(h)
            - fs.measure_of().integrate(h)
        )
        bound = 2 * eps * sup
        slack = bound - diff
        worst_slack = slack if worst_slack is None else min(worst_slack, slack)
        assert diff <= bound + 1e-9
    elapsed = time.monotonic() - start
    announce(
        1,
        elapsed < 10,
        f"100 exact-sequence identities exact, 100 subspace bounds "
        f"(min slack {worst_slack:.3g}), {elapsed:.1f}s < 10s",
    )


def test_acceptance_2_inequality_audit():
    start = time.monotonic()
    rng = random.Random(2002)
    count = 0
    for _ in range(200):
        rank = rng.randint(1, 3)
        gram = random_pd_gram(rank, 5, rng)
        report = audit_inequalities(NormedLattice.euclidean(gram))
        assert report.all_pass, f"audit failed on {gram}"
        assert len(report.entries) == 7
        count += 1
    elapsed = time.monotonic() - start
    announce(
        2,
        elapsed < 120,
        f"all 7 inequality checks pass on {count} random lattices "
        f"(rank <= 3, entries <= 5), {elapsed:.1f}s < 120s",
    )


def test_acceptance_3_hn_oracle_equivalence():
    mismatches = 0
    checked2 = 0
    for a in range(1, 4):
        for c in range(1, 4):
            for b in range(-3, 4):
                g = [[a, b], [b, c]]
                if not is_positive_definite(g):
                    continue
                _, mu_max, _, _ = slope_invariants(NormedLattice.euclidean(g))
                if mu_max != oracle_mu_max(g, 4):
                    mismatches += 1
                checked2 += 1
    rng = random.Random(3003)
    checked3 = 0
    while checked3 < 50:
        g = random_pd_gram(3, 3, rng)
        _, mu_max, mu_min, _ = slope_invariants(NormedLattice.euclidean(g))
        if mu_max != oracle_mu_max(g, 5):
            mismatches += 1
        if mu_min != -oracle_mu_max(linalg.inverse(g), 5):
            mismatches += 1
        checked3 += 1
    announce(
        3,
        mismatches == 0,
        f"slope invariants match brute force on {checked2} rank-2 grams "
        f"(exhaustive) and {checked3} rank-3 instances, 0 mismatches",
    )


def test_acceptance_4_model_reproduction():
    start = time.monotonic()
    p1 = build(ModelSpec("weighted_p1", lam=1))
    _, vol_hat = arithmetic_volume_estimate(p1, [400])
    ok_vol = abs(vol_hat - 1) <= 0.03
    fine = DiracMixture.uniform([Fraction(j, 800) for j in range(801)])
    dist = cdf_distance(p1.measure(400), fine)
    ok_cdf = dist <= 0.02
    identity = volume_identity_check(p1, [100, 200, 300, 400], tol=0.02)
    ok_identity = identity.verdict == PASS

    ct = build(ModelSpec("constant_twist", lam=HALF))
    _, ct_vol_hat = arithmetic_volume_estimate(ct, [400])
    ok_ct_vol = abs(ct_vol_hat - 1) <= 0.03
    ct_dist = cdf_distance(ct.measure(400), DiracMixture.point(HALF))
    ok_ct = ct_dist <= 0.02
    elapsed = time.monotonic() - start
    announce(
        4,
        ok_vol and ok_cdf and ok_identity and ok_ct_vol and ok_ct
        and elapsed < 30,
        f"weighted_p1: vol_hat={vol_hat:.4f} (3% of 1), cdf dist "
        f"{dist:.4f} <= 0.02, identity {identity.detail}; constant_twist: "
        f"vol_hat={ct_vol_hat:.4f}, dist {ct_dist:.3g}; {elapsed:.1f}s < 30s",
    )


def test_acceptance_5_fujita_experiment():
    start = time.monotonic()
    ts = build(ModelSpec("two_sided", a=1, b=-1))
    even = fujita_experiment(ts, [2, 4, 8], max_degree=400, tol=0.03)
    ok_even = all(r["within_tol"] for r in even["rows"])
    odd = fujita_experiment(ts, [3, 5, 7], max_degree=400)
    vals = [r["vol_hat"] for r in odd["rows"]]
    ok_odd = vals[0] < vals[1] < vals[2]
    elapsed = time.monotonic() - start
    announce(
        5,
        ok_even and ok_odd and elapsed < 60,
        f"vol_hat within 3% of baseline {even['baseline_vol_hat']:.4f} for "
        f"p=2,4,8; strictly increasing {[f'{v:.4f}' for v in vals]} for "
        f"p=3,5,7; {elapsed:.1f}s < 60s",
    )


def test_acceptance_6_truncation_comparison():
    ts = build(ModelSpec("two_sided", a=1, b=-1))
    xs = [Fraction(-1, 2), Fraction(0), HALF]
    subs = {
        "B(2)": ts.generated_subalgebra(2),
        "B[0]": ts.effective_subseries(0),
    }
    all_ok = True
    for name, sub in subs.items():
        report = truncation_comparison(ts, sub, xs, 400)
        all_ok = all_ok and report.all_pass
    announce(
        6,
        all_ok,
        "exact rank-tail inequalities pass at x in {-1/2, 0, 1/2}, "
        "degree <= 400, for the degree-2 subalgebra and the effective series",
    )


def test_acceptance_7_finite_level_domination():
    rng = random.Random(7007)
    p1 = build(ModelSpec("weighted_p1", lam=1))
    perturbations = []
    for _ in range(50):
        m = rng.randint(3, 30)
        c0 = Fraction(rng.randint(0, 8), rng.randint(1, 4))
        c1 = Fraction(rng.randint(0, 3))
        perturbations.append(
            (m, lambda a, c0=c0, c1=c1: c0 + c1 * a[-1])
        )
    report = metric_comparison_experiment(p1, perturbations)
    ok = report.all_pass and len(report.entries) == 50
    announce(
        7,
        ok,
        "measure domination and integral monotonicity pass on 50 seeded "
        "nonnegative weight perturbations of weighted_p1",
    )


def test_acceptance_8_h0_integral_diagnostic():
    rng = random.Random(8008)
    worst_c = 0.0
    checked = 0
    for _ in range(100):
        rank = rng.randint(1, 5)
        base_lat = build(
            ModelSpec(
                "random_lattice", rank=rank, bound=2, seed=rng.randrange(2**32)
            )
        )
        gram = base_lat.norm.gram
        s = rng.choice([1, 2, 3])
        if s != 1:
            gram = [[Fraction(x, s * s) for x in row] for row in gram]
        lat = NormedLattice.euclidean(gram)
        nu = slope_filtration(lat).measure_of()
        integral = rank * nu.integrate(PiecewiseLinear.relu())
        diff = abs(float(h0(lat)) - integral)
        c = diff / (rank * (1 + math.log(rank)))
        worst_c = max(worst_c, c)
        checked += 1
    announce(
        8,
        worst_c <= 3,
        f"|h0 - r * integral of max(x,0) d(slope measure)| <= "
        f"C*r*(1+log r) on {checked} random lattices with fitted "
        f"C = {worst_c:.3f} <= 3",
    )
