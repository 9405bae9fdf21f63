"""Exact integer matrix routines: determinants, psd tests, Hermite form.

Everything here works on plain Python ints (arbitrary precision), so the
results are exact.  Matrices are lists of lists or tuples of tuples.
"""

from __future__ import annotations


def as_rows(M):
    """Copy a matrix into a mutable list-of-lists of Python ints."""
    return [[int(x) for x in row] for row in M]


def is_symmetric(M) -> bool:
    n = len(M)
    return all(len(row) == n for row in M) and all(
        M[i][j] == M[j][i] for i in range(n) for j in range(i))


def det_int(M) -> int:
    """Determinant of an integer matrix via fraction-free (Bareiss) elimination."""
    A = as_rows(M)
    n = len(A)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if A[k][k] == 0:
            for r in range(k + 1, n):
                if A[r][k] != 0:
                    A[k], A[r] = A[r], A[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                A[i][j] = (A[i][j] * A[k][k] - A[i][k] * A[k][j]) // prev
        prev = A[k][k]
    return sign * A[n - 1][n - 1]


def is_positive_definite(M) -> bool:
    """Exact test: all leading principal minors positive."""
    A = as_rows(M)
    n = len(A)
    prev = 1
    for k in range(n):
        if k > 0:
            piv = A[k - 1][k - 1]
            if piv <= 0:
                return False
            for i in range(k, n):
                for j in range(k, n):
                    A[i][j] = (A[i][j] * piv - A[i][k - 1] * A[k - 1][j]) // prev
            prev = piv
    # after elimination the diagonal holds the ratios of leading minors
    return all(A[k][k] > 0 for k in range(n))


def is_psd(M) -> bool:
    """Exact positive-semidefinite test for a symmetric integer matrix.

    Fraction-free symmetric elimination with diagonal pivoting: a symmetric
    matrix is psd iff repeatedly removing a positive diagonal pivot leaves a
    psd complement, and a matrix with no positive diagonal entry is psd only
    if it vanishes.
    """
    A = as_rows(M)
    active = list(range(len(A)))
    prev = 1
    while active:
        piv = None
        for i in active:
            if A[i][i] < 0:
                return False
            if A[i][i] > 0 and piv is None:
                piv = i
        if piv is None:
            return all(A[i][j] == 0 for i in active for j in active)
        p = A[piv][piv]
        active = [i for i in active if i != piv]
        for i in active:
            Ai, Apiv = A[i], A[piv]
            aip = Ai[piv]
            for j in active:
                Ai[j] = (p * Ai[j] - aip * Apiv[j]) // prev
        prev = p
    return True


def hnf_rows(mat):
    """Nonzero rows of a row-style Hermite basis for the integer row span."""
    rows = [list(map(int, r)) for r in mat]
    m = len(rows)
    n = len(rows[0]) if rows else 0
    piv = 0
    for col in range(n):
        best = None
        for r in range(piv, m):
            if rows[r][col] != 0 and (best is None or
                                      abs(rows[r][col]) < abs(rows[best][col])):
                best = r
        if best is None:
            continue
        rows[piv], rows[best] = rows[best], rows[piv]
        changed = True
        while changed:
            changed = False
            for r in range(piv + 1, m):
                if rows[r][col] != 0:
                    q = rows[r][col] // rows[piv][col]
                    rows[r] = [a - q * b for a, b in zip(rows[r], rows[piv])]
                    if rows[r][col] != 0:
                        rows[piv], rows[r] = rows[r], rows[piv]
                        changed = True
        if rows[piv][col] < 0:
            rows[piv] = [-a for a in rows[piv]]
        piv += 1
        if piv == m:
            break
    return [r for r in rows if any(r)]


def inverse_unimodular(M):
    """Exact inverse of an integer matrix with determinant +-1.

    Gauss-Jordan over rationals would do; since |det| = 1 the adjugate route
    stays integral: inv = adj(M) / det(M).
    """
    n = len(M)
    d = det_int(M)
    if d not in (1, -1):
        raise ValueError("matrix is not unimodular")
    adj = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            minor = [[M[r][c] for c in range(n) if c != j]
                     for r in range(n) if r != i]
            cof = det_int(minor)
            if (i + j) % 2:
                cof = -cof
            adj[j][i] = cof
    if d == -1:
        adj = [[-x for x in row] for row in adj]
    return adj
