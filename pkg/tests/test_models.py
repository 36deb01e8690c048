import random
from fractions import Fraction

import pytest

from arithvol import linalg
from arithvol.filtration import FilteredSpace
from arithvol.graded import WeightedMonomialSeries
from arithvol.lattice import NormedLattice, is_positive_definite
from arithvol.measure import DiracMixture
from arithvol.models import (
    KINDS,
    ModelSpec,
    build,
    oracle,
    random_filtered_space,
    random_subspace,
)


def test_spec_validation():
    with pytest.raises(ValueError):
        ModelSpec("nonsense")
    with pytest.raises(ValueError):
        ModelSpec("random_lattice", rank=2)  # missing seed
    spec = ModelSpec("weighted_p1", lam=2)
    assert spec.kind in KINDS


def test_spec_dict_roundtrip():
    spec = ModelSpec("two_sided", a=1, b=-1)
    again = ModelSpec.from_dict(spec.to_dict())
    assert again.kind == spec.kind
    assert again.params == spec.params


def test_build_deterministic_kinds():
    p1 = build(ModelSpec("weighted_p1", lam=Fraction(1, 2)))
    assert isinstance(p1, WeightedMonomialSeries)
    assert p1.weights_at(2) == [Fraction(1), Fraction(1, 2), Fraction(0)]
    pn = build(ModelSpec("weighted_pn", N=2, lam=1))
    assert pn.rank(2) == 6
    ct = build(ModelSpec("constant_twist", lam=3))
    assert ct.measure(5) == DiracMixture.point(3)
    ts = build(ModelSpec("two_sided", a=1, b=-1))
    assert ts.weights_at(1) == [Fraction(1), Fraction(-1)]


def test_random_lattice_pd_and_deterministic():
    spec = ModelSpec("random_lattice", rank=3, bound=2, seed=42)
    l1 = build(spec)
    l2 = build(spec)
    assert isinstance(l1, NormedLattice)
    assert l1.norm.gram == l2.norm.gram
    assert is_positive_definite(l1.norm.gram)
    other = build(ModelSpec("random_lattice", rank=3, bound=2, seed=43))
    assert other.norm.gram != l1.norm.gram


def test_random_flag_valid_and_deterministic():
    spec = ModelSpec("random_flag", dim=4, seed=7)
    f1 = build(spec)
    f2 = build(spec)
    assert isinstance(f1, FilteredSpace)
    assert f1.ambient_dim == 4
    assert f1.levels() == f2.levels()
    assert f1.ranks()[0] == 4
    assert f1.ranks() == sorted(f1.ranks(), reverse=True)


def test_random_filtered_space_many_seeds():
    for seed in range(20):
        rng = random.Random(seed)
        dim = rng.randint(1, 6)
        fs = random_filtered_space(dim, rng)
        assert fs.ambient_dim == dim
        assert sum(fs.measure_of().weights()) == 1


def test_random_subspace_rank():
    rng = random.Random(3)
    for _ in range(20):
        v = random_subspace(5, rng)
        k = linalg.num_cols(v)
        if k:
            assert linalg.rank(v) == k


def test_oracle_records():
    orc = oracle(ModelSpec("weighted_p1", lam=2))
    assert orc["vol"] == 1
    assert orc["vol_hat"] == 2
    ref = orc["reference_measure"](4)
    assert len(ref.atoms) == 5
    ts = oracle(ModelSpec("two_sided", a=1, b=-1))
    assert ts["vol_hat"] == Fraction(1, 2)
    assert ts["vol_hat_subalgebra"](2) == Fraction(1, 2)
    assert ts["vol_hat_subalgebra"](3) == Fraction(8, 18)
    assert ts["vol_subalgebra"](5) == Fraction(2, 5)
    with pytest.raises(ValueError):
        oracle(ModelSpec("two_sided", a=2, b=-1))
    with pytest.raises(ValueError):
        oracle(ModelSpec("random_lattice", rank=2, seed=1))
