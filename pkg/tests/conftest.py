"""Shared fixtures and independent oracles for the test suite.

The oracles here deliberately avoid the package's enumeration machinery.
Catalog lattices are modelled directly in ambient coordinates (integer or
all-half-integer vectors with an even-sum condition), so vector counts and
inner products can be brute-forced from first principles and compared with
the library's Gram-matrix computations.
"""

import itertools
from fractions import Fraction

import numpy as np
import pytest

import stable_theta as st


@pytest.fixture(scope="session")
def e8():
    return st.catalog_lattice("E8")


@pytest.fixture(scope="session")
def d16():
    return st.catalog_lattice("D16plus")


@pytest.fixture(scope="session")
def e8e8():
    return st.catalog_lattice("E8+E8")


def ambient_glue_vectors(n, bound):
    """All nonzero vectors of the glue extension of D_n with norm <= bound,
    in doubled ambient coordinates (so all entries are integers)."""
    out = []
    r = int(np.floor(np.sqrt(bound)))
    for pt in itertools.product(range(-r, r + 1), repeat=n):
        nrm = sum(a * a for a in pt)
        if 0 < nrm <= bound and sum(pt) % 2 == 0:
            out.append(tuple(2 * a for a in pt))
    rh = int(np.floor(np.sqrt(bound)))
    odd = range(-2 * rh - 1, 2 * rh + 2, 2)
    for pt in itertools.product(odd, repeat=n):
        if sum(a * a for a in pt) <= 4 * bound:
            if sum((a - 1) // 2 for a in pt) % 2 == 0:
                out.append(tuple(pt))
    return out


def ambient_norm(v):
    """Norm of a doubled ambient vector."""
    q, r = divmod(sum(a * a for a in v), 4)
    assert r == 0
    return q


def ambient_counts(n, bound):
    counts = {}
    for v in ambient_glue_vectors(n, bound):
        nrm = ambient_norm(v)
        counts[nrm] = counts.get(nrm, 0) + 1
    return counts


def box_short_vectors(gram, bound):
    """Plain box enumeration oracle for small ranks, via exact dual bounds.

    Returns the set of +-orbit representatives (lexicographically smaller of
    each pair), with norms, for cross-checking short_vectors.
    """
    n = len(gram)
    g = [[Fraction(x) for x in row] for row in gram]
    # exact inverse by Gauss-Jordan
    inv = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    a = [row[:] for row in g]
    for col in range(n):
        piv = next(r for r in range(col, n) if a[r][col] != 0)
        a[col], a[piv] = a[piv], a[col]
        inv[col], inv[piv] = inv[piv], inv[col]
        d = a[col][col]
        a[col] = [x / d for x in a[col]]
        inv[col] = [x / d for x in inv[col]]
        for r in range(n):
            if r != col and a[r][col] != 0:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
                inv[r] = [x - f * y for x, y in zip(inv[r], inv[col])]
    radii = [int(np.floor(np.sqrt(float(bound * inv[i][i])))) for i in range(n)]
    found = set()
    for pt in itertools.product(*[range(-r, r + 1) for r in radii]):
        nrm = sum(pt[i] * gram[i][j] * pt[j] for i in range(n) for j in range(n))
        if 0 < nrm <= bound:
            found.add((nrm, max(pt, tuple(-x for x in pt))))
    return found


def sigma(k, n):
    """Sum of k-th powers of the divisors of n."""
    return sum(d ** k for d in range(1, n + 1) if n % d == 0)
