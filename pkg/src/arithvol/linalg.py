"""Exact linear algebra over the rationals and over the integers.

Matrices are lists (or tuples) of rows.  Bases of subspaces and sublattices
are stored as matrices whose *columns* span the space, matching the rest of
the package.  Everything here is exact: rational elimination uses
fractions.Fraction, lattice routines use arbitrary-precision integers.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd


# ---------------------------------------------------------------------------
# basic construction helpers


def frac_matrix(rows):
    return [[Fraction(x) for x in row] for row in rows]


def identity(n, one=Fraction(1)):
    zero = one * 0
    return [[one if i == j else zero for j in range(n)] for i in range(n)]


def transpose(m):
    return [list(col) for col in zip(*m)] if m else []


def matmul(a, b):
    if not a or not b:
        return []
    bt = transpose(b)
    return [[sum(x * y for x, y in zip(row, col)) for col in bt] for row in a]


def matvec(a, v):
    return [sum(x * y for x, y in zip(row, v)) for row in a]


def num_cols(m):
    return len(m[0]) if m else 0


def columns(m):
    return [list(col) for col in zip(*m)] if m and m[0] else []


def from_columns(cols, nrows=None):
    if not cols:
        return [[] for _ in range(nrows)] if nrows else []
    return [list(row) for row in zip(*cols)]


# ---------------------------------------------------------------------------
# rational elimination


def rref(m):
    """Reduced row echelon form; returns (rref_matrix, pivot_columns)."""
    a = frac_matrix(m)
    if not a:
        return a, []
    nrows, ncols = len(a), len(a[0])
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, nrows) if a[i][c] != 0), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = 1 / a[r][c]
        a[r] = [x * inv for x in a[r]]
        for i in range(nrows):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return a, pivots


def rank(m):
    if not m or not m[0]:
        return 0
    return len(rref(m)[1])


def solve_columns(a, b):
    """Solve a @ x = b where columns of `a` are the generators.

    Returns the coefficient vector x (Fractions) or None if inconsistent.
    """
    if not a or not a[0]:
        return None if any(x != 0 for x in b) else []
    aug = [list(row) + [bv] for row, bv in zip(a, b)]
    red, pivots = rref(aug)
    ncols = num_cols(a)
    if ncols in pivots:
        return None
    x = [Fraction(0)] * ncols
    for r, c in enumerate(pivots):
        x[c] = red[r][-1]
    return x


def in_colspace(a, v) -> bool:
    return solve_columns(a, v) is not None


def nullspace(m):
    """Basis (as columns) of {x : m @ x = 0}."""
    ncols = num_cols(m)
    if ncols == 0:
        return [[] for _ in m] if m else []
    red, pivots = rref(m)
    free = [c for c in range(ncols) if c not in pivots]
    basis_cols = []
    for f in free:
        x = [Fraction(0)] * ncols
        x[f] = Fraction(1)
        for r, c in enumerate(pivots):
            x[c] = -red[r][f]
        basis_cols.append(x)
    return from_columns(basis_cols, nrows=ncols)


def colspace_basis(m):
    """Matrix whose columns are the pivot columns of m (a basis of col m)."""
    if not m or not m[0]:
        return [[] for _ in m]
    _, pivots = rref(m)
    cols = columns(m)
    return from_columns([cols[c] for c in pivots], nrows=len(m))


def intersect_colspaces(a, b):
    """Basis (columns) of col(a) & col(b)."""
    nrows = len(a) if a else len(b)
    ka, kb = num_cols(a), num_cols(b)
    if ka == 0 or kb == 0:
        return [[] for _ in range(nrows)]
    combined = [list(ra) + [-x for x in rb] for ra, rb in zip(a, b)]
    null = nullspace(combined)
    if num_cols(null) == 0:
        return [[] for _ in range(nrows)]
    coeff_a = [row[:ka] for row in null]
    inter = matmul(a, coeff_a)
    return colspace_basis(inter)


def complete_basis(a):
    """Extend columns of a to a basis of the ambient space.

    Completion columns are chosen greedily from the standard basis, so the
    result is deterministic.  Returns the square matrix [a | completion].
    """
    nrows = len(a)
    cols = columns(a) if a and a[0] else []
    cur_rank = rank(a) if cols else 0
    if cur_rank != len(cols):
        raise ValueError("basis matrix must have full column rank")
    for j in range(nrows):
        if len(cols) == nrows:
            break
        e = [Fraction(1) if i == j else Fraction(0) for i in range(nrows)]
        cand = from_columns(cols + [e], nrows=nrows)
        if rank(cand) > len(cols):
            cols.append(e)
    return from_columns(cols, nrows=nrows)


def inverse(m):
    n = len(m)
    aug = [list(map(Fraction, row)) + list(ide) for row, ide in zip(m, identity(n))]
    red, pivots = rref(aug)
    if pivots != list(range(n)):
        raise ValueError("matrix is singular")
    return [row[n:] for row in red]


def det(m):
    a = frac_matrix(m)
    n = len(a)
    sign = 1
    result = Fraction(1)
    for c in range(n):
        piv = next((i for i in range(c, n) if a[i][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            a[c], a[piv] = a[piv], a[c]
            sign = -sign
        result *= a[c][c]
        inv = 1 / a[c][c]
        for i in range(c + 1, n):
            if a[i][c] != 0:
                f = a[i][c] * inv
                a[i] = [x - f * y for x, y in zip(a[i], a[c])]
    return result * sign


# ---------------------------------------------------------------------------
# integer lattice routines


def row_hnf(m):
    """Row Hermite normal form with transform: returns (h, u), u @ m = h.

    u is unimodular; h has its nonzero rows first, pivots positive, entries
    above each pivot reduced into [0, pivot).
    """
    h = [[int(x) for x in row] for row in m]
    nrows = len(h)
    ncols = len(h[0]) if h else 0
    u = [[1 if i == j else 0 for j in range(nrows)] for i in range(nrows)]
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, nrows) if h[i][c] != 0), None)
        if piv is None:
            continue
        h[r], h[piv] = h[piv], h[r]
        u[r], u[piv] = u[piv], u[r]
        for i in range(r + 1, nrows):
            while h[i][c] != 0:
                q = h[r][c] // h[i][c]
                h[r] = [x - q * y for x, y in zip(h[r], h[i])]
                u[r] = [x - q * y for x, y in zip(u[r], u[i])]
                h[r], h[i] = h[i], h[r]
                u[r], u[i] = u[i], u[r]
        if h[r][c] < 0:
            h[r] = [-x for x in h[r]]
            u[r] = [-x for x in u[r]]
        for i in range(r):
            q = h[i][c] // h[r][c]
            if q:
                h[i] = [x - q * y for x, y in zip(h[i], h[r])]
                u[i] = [x - q * y for x, y in zip(u[i], u[r])]
        r += 1
        if r == nrows:
            break
    return h, u


def column_hnf_key(m):
    """Canonical hashable key for the integer column lattice of m."""
    if not m or not m[0]:
        return ()
    h, _ = row_hnf(transpose(m))
    rows = tuple(tuple(row) for row in h if any(row))
    return rows


def column_hnf(m):
    """Canonical HNF basis (columns) of the integer column lattice of m."""
    key = column_hnf_key(m)
    nrows = len(m)
    return from_columns([list(row) for row in key], nrows=nrows)


def integer_kernel(m):
    """Basis (columns) of the saturated lattice {x in Z^n : m @ x = 0}."""
    ncols = num_cols(m)
    if ncols == 0:
        return []
    h, u = row_hnf(transpose(m))
    kernel_rows = [u[i] for i in range(len(h)) if not any(h[i])]
    return from_columns([list(r) for r in kernel_rows], nrows=ncols)


def clear_denominators(m):
    """Scale a rational matrix column-wise to primitive integer columns."""
    cols = columns(m)
    out = []
    for col in cols:
        fr = [Fraction(x) for x in col]
        den = 1
        for x in fr:
            den = den // gcd(den, x.denominator) * x.denominator
        ints = [int(x * den) for x in fr]
        g = 0
        for x in ints:
            g = gcd(g, abs(x))
        if g > 1:
            ints = [x // g for x in ints]
        out.append(ints)
    return from_columns(out, nrows=len(m))


def saturation(a):
    """Saturated integer basis (columns, HNF canonical) of span_Q(col a) in Z^r.

    a may have rational entries; its columns must be linearly independent
    or merely spanning (redundant columns are allowed).
    """
    nrows = len(a)
    if num_cols(a) == 0:
        return [[] for _ in range(nrows)]
    basis = colspace_basis(frac_matrix(a))
    if num_cols(basis) == 0:
        return [[] for _ in range(nrows)]
    if num_cols(basis) == nrows:
        return identity(nrows, one=1)
    constraints = nullspace(transpose(basis))
    cmat = clear_denominators(constraints)
    kernel = integer_kernel(transpose(cmat))
    return column_hnf(kernel)


def saturation_int(a):
    """Saturation of the column span of an integer matrix, via two integer
    kernels: sat(A) = ker_Z(transpose(ker_Z(A^T)))."""
    nrows = len(a)
    left_kernel = integer_kernel(transpose(a))
    if num_cols(left_kernel) == 0:
        return identity(nrows, one=1)
    return column_hnf(integer_kernel(transpose(left_kernel)))


def primitive_vector(v):
    """Primitive integer generator of the line through rational vector v."""
    fr = [Fraction(x) for x in v]
    den = 1
    for x in fr:
        den = den // gcd(den, x.denominator) * x.denominator
    ints = [int(x * den) for x in fr]
    g = 0
    for x in ints:
        g = gcd(g, abs(x))
    if g == 0:
        raise ValueError("zero vector has no primitive generator")
    ints = [x // g for x in ints]
    for x in ints:
        if x != 0:
            if x < 0:
                ints = [-y for y in ints]
            break
    return ints
