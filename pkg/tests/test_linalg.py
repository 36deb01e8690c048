import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from arithvol import linalg

small_entries = st.integers(min_value=-5, max_value=5)


def square_matrices(n):
    return st.lists(
        st.lists(small_entries, min_size=n, max_size=n), min_size=n, max_size=n
    )


def test_rref_identity():
    m = linalg.identity(3)
    red, pivots = linalg.rref(m)
    assert red == m
    assert pivots == [0, 1, 2]


def test_rank_and_nullspace():
    m = [[1, 2, 3], [2, 4, 6]]
    assert linalg.rank(m) == 1
    null = linalg.nullspace(m)
    assert linalg.num_cols(null) == 2
    for col in linalg.columns(null):
        assert all(x == 0 for x in linalg.matvec(m, col))


def test_solve_columns():
    a = [[1, 0], [0, 2], [1, 1]]
    b = [1, 4, 3]
    x = linalg.solve_columns(a, b)
    assert linalg.matvec(a, x) == [Fraction(1), Fraction(4), Fraction(3)]
    assert linalg.solve_columns(a, [1, 0, 0]) is None


def test_intersection():
    a = [[1, 0], [0, 1], [0, 0]]
    b = [[0, 0], [1, 0], [0, 1]]
    inter = linalg.intersect_colspaces(a, b)
    assert linalg.num_cols(inter) == 1
    assert linalg.in_colspace([[0], [1], [0]], linalg.columns(inter)[0])


def test_complete_basis_deterministic():
    a = [[1], [1], [0]]
    full = linalg.complete_basis(a)
    assert linalg.rank(full) == 3
    # greedy standard-basis completion picks e1 then e3
    assert linalg.columns(full)[1] == [1, 0, 0]
    assert linalg.columns(full)[2] == [0, 0, 1]


@settings(max_examples=40)
@given(square_matrices(3))
def test_inverse_roundtrip(m):
    if linalg.det(m) == 0:
        return
    inv = linalg.inverse(m)
    assert linalg.matmul(m, inv) == linalg.identity(3)


@settings(max_examples=40)
@given(square_matrices(3))
def test_det_multiplicative(m):
    n = [[1, 2, 0], [0, 1, 1], [1, 0, 1]]
    assert linalg.det(linalg.matmul(m, n)) == linalg.det(m) * linalg.det(n)


def test_row_hnf_transform():
    m = [[2, 4], [6, 8], [3, 5]]
    h, u = linalg.row_hnf(m)
    assert linalg.matmul(u, m) == h
    assert abs(linalg.det(u)) == 1
    # pivots positive, zero rows at bottom
    assert h[-1] == [0, 0] or all(any(row) for row in h)


def test_column_hnf_canonical():
    a = [[1, 0], [0, 1]]
    b = [[1, 1], [0, 1]]
    assert linalg.column_hnf_key(a) == linalg.column_hnf_key(b)
    c = [[2, 0], [0, 1]]
    assert linalg.column_hnf_key(a) != linalg.column_hnf_key(c)


def test_integer_kernel():
    m = [[1, 2, 3]]
    k = linalg.integer_kernel(m)
    assert linalg.num_cols(k) == 2
    for col in linalg.columns(k):
        assert sum(a * b for a, b in zip([1, 2, 3], col)) == 0
    # kernel is saturated: (1,1,-1) lies in it
    assert linalg.in_colspace(linalg.frac_matrix(k), [1, 1, -1])


def test_saturation_of_non_primitive_span():
    a = [[2], [4]]
    sat = linalg.saturation(a)
    assert linalg.columns(sat) == [[1, 2]]
    sat_i = linalg.saturation_int(a)
    assert linalg.columns(sat_i) == [[1, 2]]


def test_saturation_index_two():
    # span of (1,1) and (1,-1) has index 2 in its saturation
    a = [[1, 1], [1, -1]]
    sat = linalg.saturation(a)
    assert abs(linalg.det(sat)) == 1
    assert linalg.saturation_int(a) == sat


@settings(max_examples=30)
@given(st.lists(st.lists(small_entries, min_size=4, max_size=4), min_size=2, max_size=3))
def test_saturation_int_matches_rational(cols):
    a = linalg.from_columns(cols, nrows=4)
    if linalg.rank(a) != len(cols):
        return
    assert linalg.saturation_int(a) == linalg.saturation(a)


def test_primitive_vector():
    assert linalg.primitive_vector([2, 4, 6]) == [1, 2, 3]
    assert linalg.primitive_vector([-2, 4]) == [1, -2]
    assert linalg.primitive_vector([Fraction(1, 2), Fraction(1, 3)]) == [3, 2]
    with pytest.raises(ValueError):
        linalg.primitive_vector([0, 0])


def test_saturation_randomized_contains_span():
    rng = random.Random(5)
    for _ in range(20):
        cols = [[rng.randint(-4, 4) for _ in range(4)] for _ in range(2)]
        a = linalg.from_columns(cols, nrows=4)
        if linalg.rank(a) != 2:
            continue
        sat = linalg.saturation(a)
        assert linalg.num_cols(sat) == 2
        for col in cols:
            assert linalg.in_colspace(linalg.frac_matrix(sat), col)
