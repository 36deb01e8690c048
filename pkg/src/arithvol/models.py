"""Built-in instances with closed-form oracles.

Model kinds:
  weighted_p1(lam)        monomials in 2 variables, weight lam*a_1
  weighted_pn(N, lam)     monomials in N+1 variables, weight lam*a_N
  constant_twist(lam)     weight lam*n on every degree-n monomial (2 vars)
  two_sided(a, b)         weight a*a_1 + b*a_0 (2 vars), mixed signs
  random_lattice(rank, bound, seed)   Euclidean gram M^T M + I
  random_flag(dim, seed)  random filtered space with rational levels

Oracle records keep exact pieces (rationals and rational multiples of the
parameters); reference measures are produced on demand per degree.
"""

from __future__ import annotations

import random
from fractions import Fraction

from . import linalg
from .filtration import FilteredSpace
from .graded import GradedSeries, WeightedMonomialSeries
from .lattice import NormedLattice
from .measure import DiracMixture

KINDS = (
    "weighted_p1",
    "weighted_pn",
    "constant_twist",
    "two_sided",
    "random_lattice",
    "random_flag",
)


class ModelSpec:
    def __init__(self, kind: str, **params):
        if kind not in KINDS:
            raise ValueError(f"unknown model kind {kind!r}")
        self.kind = kind
        self.params = params
        if kind.startswith("random") and "seed" not in params:
            raise ValueError("random models require a seed")

    def to_dict(self) -> dict:
        return {"kind": self.kind, "params": dict(self.params)}

    @classmethod
    def from_dict(cls, data: dict) -> "ModelSpec":
        return cls(data["kind"], **data.get("params", {}))

    def __repr__(self):
        args = ", ".join(f"{k}={v}" for k, v in self.params.items())
        return f"ModelSpec({self.kind}, {args})"


def build(spec: ModelSpec):
    kind, p = spec.kind, spec.params
    if kind == "weighted_p1":
        lam = Fraction(p.get("lam", 1))
        return GradedSeries.weighted_monomial(1, [0, lam])
    if kind == "weighted_pn":
        n_dim = int(p["N"])
        lam = Fraction(p.get("lam", 1))
        return GradedSeries.weighted_monomial(
            n_dim, [0] * n_dim + [lam]
        )
    if kind == "constant_twist":
        lam = Fraction(p.get("lam", 1))
        return GradedSeries.weighted_monomial(1, [0, 0], w0=lam)
    if kind == "two_sided":
        a = Fraction(p.get("a", 1))
        b = Fraction(p.get("b", -1))
        return GradedSeries.weighted_monomial(1, [b, a])
    if kind == "random_lattice":
        rank = int(p["rank"])
        bound = int(p.get("bound", 5))
        rng = random.Random(p["seed"])
        while True:
            m = [
                [rng.randint(-bound, bound) for _ in range(rank)]
                for _ in range(rank)
            ]
            gram = linalg.matmul(linalg.transpose(m), m)
            for i in range(rank):
                gram[i][i] += 1
            try:
                return NormedLattice.euclidean(gram)
            except ValueError:
                continue
    if kind == "random_flag":
        dim = int(p["dim"])
        rng = random.Random(p["seed"])
        return random_filtered_space(dim, rng)
    raise AssertionError(kind)


def random_filtered_space(dim: int, rng: random.Random) -> FilteredSpace:
    """Random flag: random unimodular-ish rational basis, random decreasing
    ranks, random strictly increasing rational levels."""
    if dim == 0:
        return FilteredSpace.zero()
    while True:
        basis = [
            [Fraction(rng.randint(-3, 3)) for _ in range(dim)] for _ in range(dim)
        ]
        if linalg.rank(basis) == dim:
            break
    cols = linalg.columns(basis)
    n_jumps = rng.randint(1, dim)
    ranks = sorted(rng.sample(range(1, dim + 1), n_jumps), reverse=True)
    ranks[0] = dim
    levels: set = set()
    while len(levels) < len(ranks):
        levels.add(Fraction(rng.randint(-24, 24), rng.randint(1, 3)))
    levels = sorted(levels)
    flag = []
    for level, r in zip(levels, ranks):
        flag.append((level, linalg.from_columns(cols[:r], nrows=dim)))
    return FilteredSpace(dim, flag)


def random_subspace(dim: int, rng: random.Random, max_rank=None):
    """Random rational subspace basis (columns), possibly zero-dimensional."""
    if max_rank is None:
        max_rank = dim
    k = rng.randint(0, max_rank)
    cols = []
    attempts = 0
    while len(cols) < k and attempts < 50:
        attempts += 1
        v = [Fraction(rng.randint(-3, 3)) for _ in range(dim)]
        if any(x != 0 for x in v):
            cand = cols + [v]
            if linalg.rank(linalg.from_columns(cand, nrows=dim)) == len(cand):
                cols = cand
    return linalg.from_columns(cols, nrows=dim) if cols else [[] for _ in range(dim)]


def oracle(spec: ModelSpec) -> dict:
    """Closed-form expected values for the deterministic model kinds."""
    kind, p = spec.kind, spec.params
    if kind == "weighted_p1":
        lam = Fraction(p.get("lam", 1))
        return {
            "vol": Fraction(1),
            "vol_hat": lam,
            "mu_pi_max": lam,
            "limit_measure": ("uniform", Fraction(0), lam),
            "reference_measure": lambda n: DiracMixture.uniform(
                [Fraction(j, n) * lam for j in range(n + 1)]
            ),
        }
    if kind == "weighted_pn":
        n_dim = int(p["N"])
        lam = Fraction(p.get("lam", 1))
        return {
            "vol": Fraction(1),
            "vol_hat": lam,
            "geometric_dim": n_dim,
            "mu_pi_max": lam,
        }
    if kind == "constant_twist":
        lam = Fraction(p.get("lam", 1))
        return {
            "vol": Fraction(1),
            "vol_hat": 2 * lam,
            "mu_pi_max": lam,
            "limit_measure": ("dirac", lam),
            "reference_measure": lambda n: DiracMixture.point(lam),
        }
    if kind == "two_sided":
        a = Fraction(p.get("a", 1))
        b = Fraction(p.get("b", -1))
        if (a, b) != (1, -1):
            raise ValueError("closed forms recorded for weights (1, -1) only")
        return {
            "vol": Fraction(1),
            "vol_hat": Fraction(1, 2),
            "mu_pi_max": Fraction(1),
            "limit_measure": ("uniform", Fraction(-1), Fraction(1)),
            "effective_tail_mass": Fraction(1, 2),
            # subalgebra generated in degree p (regraded to original degrees)
            "vol_subalgebra": lambda p_: Fraction(p_ // 2, p_),
            "vol_hat_subalgebra": lambda p_: (
                Fraction(1, 2)
                if p_ % 2 == 0
                else Fraction(p_ * p_ - 1, 2 * p_ * p_)
            ),
            "reference_measure": lambda n: DiracMixture.uniform(
                [Fraction(2 * j - n, n) for j in range(n + 1)]
            ),
        }
    raise ValueError(f"no closed-form oracle for kind {spec.kind!r}")
