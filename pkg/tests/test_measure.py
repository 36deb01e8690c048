import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from arithvol.measure import (
    DiracMixture,
    PiecewiseLinear,
    cdf_distance,
    dominates,
)

HALF = Fraction(1, 2)


def mix(*atoms):
    return DiracMixture(list(atoms))


def test_cdf_examples():
    m = mix((1, HALF), (3, HALF))
    assert m.cdf(2) == HALF
    assert DiracMixture.point(0).cdf(0) == 1  # right continuity
    assert DiracMixture.zero().cdf(17) == 0


def test_cdf_monotone_and_total():
    m = mix((-1, Fraction(1, 4)), (0, Fraction(1, 4)), (2, HALF))
    values = [m.cdf(t) for t in (-2, -1, -0.5, 0, 1, 2, 3)]
    assert values == sorted(values)
    assert values[-1] == 1


def test_translate_examples():
    assert DiracMixture.point(1).translate(2) == DiracMixture.point(3)
    assert mix((0, HALF), (2, HALF)).translate(-1) == mix((-1, HALF), (1, HALF))
    m = mix((0, HALF), (5, HALF))
    assert m.translate(0) == m


def test_rescale_examples():
    assert mix((2, HALF), (4, HALF)).rescale(HALF) == mix((1, HALF), (2, HALF))
    assert DiracMixture.point(0).rescale(7) == DiracMixture.point(0)
    assert DiracMixture.point(3).rescale(Fraction(1, 3)) == DiracMixture.point(1)
    with pytest.raises(ValueError):
        DiracMixture.point(0).rescale(0)


def test_roundtrips_exact():
    m = mix((Fraction(-1, 3), HALF), (Fraction(7, 2), HALF))
    assert m.translate(5).translate(-5) == m
    assert m.rescale(Fraction(3, 7)).rescale(Fraction(7, 3)) == m


def test_dominates_examples():
    assert dominates(DiracMixture.point(1), DiracMixture.point(0)) == "first"
    assert (
        dominates(DiracMixture.point(1), mix((0, HALF), (2, HALF)))
        == "incomparable"
    )
    m = mix((0, HALF), (1, HALF))
    assert dominates(m, m) == "equal"
    assert dominates(DiracMixture.point(0), DiracMixture.point(1)) == "second"
    with pytest.raises(ValueError):
        dominates(DiracMixture.zero(), m)


def test_dominates_point_masses_iff_ordered():
    for a in (-2, 0, 1):
        for b in (-2, 0, 1):
            verdict = dominates(DiracMixture.point(a), DiracMixture.point(b))
            if a == b:
                assert verdict == "equal"
            elif a > b:
                assert verdict == "first"
            else:
                assert verdict == "second"


def test_integrate_examples():
    relu = PiecewiseLinear.relu()
    assert mix((-1, HALF), (3, HALF)).integrate(relu) == pytest.approx(1.5)
    lam = 0.7
    assert DiracMixture.point(lam).integrate(relu) == pytest.approx(lam)
    n = 10
    u = DiracMixture.uniform([Fraction(j, n) for j in range(1, n + 1)])
    ident = PiecewiseLinear.identity()
    brute = sum(j / n for j in range(1, n + 1)) / n
    assert u.integrate(ident) == pytest.approx(brute)


def test_integrate_translate_consistency():
    m = mix((-1, HALF), (2, HALF))
    h = PiecewiseLinear.relu()
    assert m.translate(Fraction(1, 2)).integrate(h) == pytest.approx(
        m.integrate(h.shifted(Fraction(1, 2)))
    )


def test_piecewise_linear_shapes():
    h = PiecewiseLinear.min_with(10)
    assert float(h.evaluate(3)) == 3
    assert float(h.evaluate(12)) == 10
    clamp = PiecewiseLinear([0, 1], 0, [0, 1, 0])
    assert float(clamp.evaluate(-5)) == 0
    assert float(clamp.evaluate(0.5)) == 0.5
    assert float(clamp.evaluate(9)) == 1
    assert float(clamp.sup_norm_on(-10, 10)) == 1


def test_cdf_distance_examples():
    m = mix((0, HALF), (1, HALF))
    assert cdf_distance(m, m) == 0
    assert cdf_distance(DiracMixture.point(0), DiracMixture.point(1)) == pytest.approx(
        1.0, abs=1e-12
    )
    # Levy distance of two point masses at distance c < 1 is c
    assert cdf_distance(
        DiracMixture.point(0), DiracMixture.point(Fraction(1, 4))
    ) == pytest.approx(0.25, abs=1e-12)


def test_cdf_distance_uniform_grids():
    n = 8
    coarse = DiracMixture.uniform([Fraction(j, n) for j in range(1, n + 1)])
    fine = DiracMixture.uniform([Fraction(j, 2 * n) for j in range(1, 2 * n + 1)])
    assert cdf_distance(coarse, fine) <= 1 / n + 1e-12


def test_zero_measure_flagged():
    z = DiracMixture.zero()
    assert z.is_zero
    assert not mix((0, Fraction(1))).is_zero


def test_weight_validation():
    with pytest.raises(ValueError):
        DiracMixture([(0, HALF)])
    with pytest.raises(ValueError):
        DiracMixture([(0, HALF), (1, Fraction(2, 3))])
    with pytest.raises(ValueError):
        DiracMixture([(0, Fraction(-1, 2)), (1, Fraction(3, 2))])


def test_location_merge_tolerance():
    m = DiracMixture([(0, HALF), (Fraction(1, 10**40), HALF)])
    assert len(m.atoms) == 1
    assert m.atoms[0][1] == 1


def test_json_roundtrip():
    m = mix((Fraction(1, 3), Fraction(2, 5)), (math.log(2), Fraction(3, 5)))
    again = DiracMixture.from_json(m.to_json())
    assert again == m


def test_csv_export():
    csv = mix((0, HALF), (1, HALF)).to_csv()
    lines = csv.strip().split("\n")
    assert lines[0] == "x,w,cdf"
    assert len(lines) == 3
    assert lines[-1].endswith(",1/2,1")


rational_atoms = st.lists(
    st.tuples(
        st.fractions(min_value=-10, max_value=10, max_denominator=100),
        st.fractions(min_value=Fraction(1, 20), max_value=1, max_denominator=100),
    ),
    min_size=1,
    max_size=5,
)


def normalize(atoms):
    total = sum(w for _, w in atoms)
    return [(x, w / total) for x, w in atoms]


@settings(max_examples=50)
@given(rational_atoms, st.fractions(min_value=-5, max_value=5, max_denominator=100))
def test_translate_preserves_mass_and_order(atoms, a):
    m = DiracMixture(normalize(atoms))
    t = m.translate(a)
    assert sum(t.weights()) == 1
    assert dominates(t, m) == ("equal" if a == 0 else "first" if a > 0 else "second")


@settings(max_examples=50)
@given(rational_atoms)
def test_dominates_reflexive(atoms):
    m = DiracMixture(normalize(atoms))
    assert dominates(m, m) == "equal"
