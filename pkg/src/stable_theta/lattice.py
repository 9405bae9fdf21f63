"""Even positive definite lattices: catalog, enumeration, norm statistics.

A lattice is held by its Gram matrix only; every quantity the rest of the
package consumes (vector counts, tuple counts, theta coefficients) is an
isometry invariant, so no embedding coordinates are kept.  The built-in
catalog provides the two rank-16 even unimodular forms and direct sums of
catalog members; both are constructed from the index-2 extension of the
integer span D_n = {x in Z^n : sum(x) even} by the all-halves glue vector,
which for n = 8 and n = 16 is even and unimodular.

Short-vector enumeration is branch-and-bound over a floating Cholesky
decomposition with exact integer re-evaluation on acceptance; one vector of
each +-pair is kept (see SIGN_CONVENTION).
"""

from __future__ import annotations

import json

import numpy as np

from .budget import Budget, ensure_budget
from .errors import CatalogError
from .intmat import det_int, hnf_rows, inverse_unimodular, is_positive_definite, is_symmetric

SIGN_CONVENTION = "one vector per +-pair; the highest-index nonzero coordinate is positive"


class EvenLattice:
    """An even positive definite integral quadratic form, by Gram matrix."""

    __slots__ = ("rank", "gram", "name", "det", "model",
                 "_short", "_classes", "_series", "_inv", "_dense")

    def __init__(self, gram, name=None, model=None):
        rows = tuple(tuple(int(x) for x in row) for row in gram)
        if not is_symmetric(rows):
            raise ValueError("gram matrix must be symmetric")
        if any(rows[i][i] % 2 for i in range(len(rows))):
            raise ValueError("gram matrix must have even diagonal")
        if not is_positive_definite(rows):
            raise ValueError("gram matrix must be positive definite")
        self.rank = len(rows)
        self.gram = rows
        self.name = name
        self.det = det_int(rows)
        self.model = model
        self._short = {}    # bound -> sorted [(norm, vector)]
        self._classes = {}  # bound -> {norm: int64 array of sign-expanded vectors}
        self._series = {}   # bound -> {norm: count}
        self._inv = None
        self._dense = {}    # tuple-size -> (bound, table)

    def __repr__(self):
        label = self.name or f"rank{self.rank}"
        return f"EvenLattice({label}, det={self.det})"

    def __eq__(self, other):
        return isinstance(other, EvenLattice) and self.gram == other.gram

    def __hash__(self):
        return hash(self.gram)

    def norm(self, v) -> int:
        """Q(v, v) for a coordinate vector."""
        g = self.gram
        return sum(v[i] * g[i][j] * v[j] for i in range(self.rank)
                   for j in range(self.rank))

    def gram_inverse(self):
        """Exact integer inverse of the Gram matrix (unimodular lattices only)."""
        if self._inv is None:
            self._inv = tuple(tuple(r) for r in inverse_unimodular(self.gram))
        return self._inv


class NormProfile:
    """Counts of nonzero vectors by norm, up to an even bound."""

    __slots__ = ("bound", "counts")

    def __init__(self, bound, counts):
        if bound % 2:
            raise ValueError("norm bound must be even")
        self.bound = bound
        self.counts = dict(sorted(counts.items()))
        for n, c in self.counts.items():
            if n % 2 or n <= 0:
                raise ValueError(f"odd or nonpositive norm {n} in profile")
            if c % 2:
                raise ValueError(f"odd count {c} at norm {n}")

    def __eq__(self, other):
        return (isinstance(other, NormProfile)
                and self.bound == other.bound and self.counts == other.counts)

    def __repr__(self):
        return f"NormProfile(bound={self.bound}, counts={self.counts})"


def _dplus_gram(n):
    """Gram matrix of the glue extension of D_n, on an integral HNF basis.

    Generators (in doubled ambient coordinates): the differences 2e_i - 2e_{i+1},
    the sum 2e_{n-1} + 2e_n, and the all-ones glue row.
    """
    gens = []
    for i in range(n - 1):
        v = [0] * n
        v[i], v[i + 1] = 2, -2
        gens.append(v)
    v = [0] * n
    v[n - 2], v[n - 1] = 2, 2
    gens.append(v)
    gens.append([1] * n)
    basis = hnf_rows(gens)
    if len(basis) != n:
        raise AssertionError("glue construction did not produce a full basis")
    gram = [[sum(a * b for a, b in zip(basis[i], basis[j])) for j in range(n)]
            for i in range(n)]
    for i in range(n):
        for j in range(n):
            if gram[i][j] % 4:
                raise AssertionError("glue construction produced a non-integral form")
            gram[i][j] //= 4
    return gram


_CATALOG: dict[str, EvenLattice] = {}


def _builtin(name):
    if name == "E8":
        return EvenLattice(_dplus_gram(8), name="E8", model=("dplus", 8))
    if name == "D16plus":
        return EvenLattice(_dplus_gram(16), name="D16plus", model=("dplus", 16))
    return None


def register_lattice(name, gram, allow_non_unimodular=False, model=None):
    """Add a lattice to the catalog under `name`."""
    lat = EvenLattice(gram, name=name, model=model)
    if not allow_non_unimodular and not is_even_unimodular(lat):
        raise CatalogError(f"{name}: gram matrix is not even unimodular")
    _CATALOG[name] = lat
    return lat


def load_catalog(path):
    """Extend the catalog from a JSON file.

    The file holds one entry or a list of entries of the form
    {"name": str, "gram": [[int, ...], ...]}; entries are validated as even
    unimodular unless "allow_non_unimodular": true.
    """
    with open(path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    entries = data if isinstance(data, list) else [data]
    out = []
    for entry in entries:
        try:
            name = entry["name"]
            gram = entry["gram"]
        except (TypeError, KeyError) as exc:
            raise CatalogError(f"catalog entry missing field: {exc}") from exc
        out.append(register_lattice(name, gram,
                                    allow_non_unimodular=entry.get(
                                        "allow_non_unimodular", False)))
    return out


def catalog_lattice(name: str) -> EvenLattice:
    """Look up a catalog lattice; `A+B+...` builds the direct sum."""
    name = name.strip()
    if "+" in name:
        parts = [p.strip() for p in name.split("+")]
        if any(not p for p in parts):
            raise CatalogError(f"malformed direct-sum expression: {name!r}")
        lat = catalog_lattice(parts[0])
        for p in parts[1:]:
            lat = direct_sum(lat, catalog_lattice(p))
        return lat
    if name not in _CATALOG:
        built = _builtin(name)
        if built is None:
            raise CatalogError(f"unknown lattice {name!r}")
        _CATALOG[name] = built
    return _CATALOG[name]


def direct_sum(a: EvenLattice, b: EvenLattice) -> EvenLattice:
    """Orthogonal direct sum, block-diagonal Gram."""
    n = a.rank + b.rank
    gram = [[0] * n for _ in range(n)]
    for i in range(a.rank):
        for j in range(a.rank):
            gram[i][j] = a.gram[i][j]
    for i in range(b.rank):
        for j in range(b.rank):
            gram[a.rank + i][a.rank + j] = b.gram[i][j]
    name = None
    if a.name and b.name:
        name = f"{a.name}+{b.name}"
    return EvenLattice(gram, name=name, model=("sum", a, b))


def is_even_unimodular(L: EvenLattice) -> bool:
    """Even diagonal and positive definiteness hold by construction; det must be 1."""
    return L.det == 1


def short_vectors(L: EvenLattice, bound: int, budget=None):
    """All v != 0 with 0 < Q(v,v) <= bound, sign-reduced, sorted by (norm, lex).

    The bound must be even: an even lattice has no odd norms.  Interval
    bounds come from a floating Cholesky decomposition widened by a slack
    below the norm spacing; membership is decided by exact integer norms.
    """
    if bound < 0:
        raise ValueError("bound must be >= 0")
    if bound % 2:
        raise ValueError("bound must be even: an even lattice has no odd norms")
    if bound not in L._short:
        done = [b for b in L._short if b >= bound]
        if done:
            src = L._short[min(done)]
            L._short[bound] = [(n, v) for n, v in src if n <= bound]
        else:
            L._short[bound] = _enumerate_short(L, bound, ensure_budget(budget))
    return [v for _, v in L._short[bound]]


def _enumerate_short(L, bound, budget: Budget):
    m = L.rank
    if bound == 0:
        return []
    G = np.array(L.gram, dtype=np.int64)
    C = np.linalg.cholesky(np.array(L.gram, dtype=float))
    d = np.diag(C) ** 2
    U = (C / np.diag(C)).T  # unit upper triangular
    gcols = [G[:, i].copy() for i in range(m)]
    out = []
    x = np.zeros(m, dtype=np.int64)
    center = np.zeros(m, dtype=float)
    gx = np.zeros(m, dtype=np.int64)
    eps = 1e-9
    g00 = int(G[0, 0])

    def rec(i, rem, tpart, zero_above):
        half = (max(rem, 0.0) / d[i]) ** 0.5 + eps
        c = center[i]
        lo = int(np.ceil(-c - half))
        hi = int(np.floor(-c + half))
        if zero_above and lo < 0:
            lo = 0
        if hi < lo:
            return
        if i == 0:
            xs = np.arange(lo, hi + 1, dtype=np.int64)
            if zero_above:
                xs = xs[xs >= 1]
            if xs.size == 0:
                return
            budget.charge(int(xs.size))
            norms = g00 * xs * xs + 2 * int(gx[0]) * xs + tpart
            keep = (norms <= bound) & (norms > 0)
            if np.any(keep):
                tail = x[1:].tolist()
                for x0, nrm in zip(xs[keep].tolist(), norms[keep].tolist()):
                    out.append((nrm, (x0, *tail)))
            return
        budget.charge(hi - lo + 1)
        for xi in range(lo, hi + 1):
            dz = xi + c
            used = d[i] * dz * dz
            if used > rem + eps:
                continue
            x[i] = xi
            if xi:
                t2 = tpart + 2 * xi * int(gx[i]) + int(G[i, i]) * xi * xi
                gx[:] += xi * gcols[i]
                center[:i] += xi * U[:i, i]
                rec(i - 1, rem - used, t2, False)
                center[:i] -= xi * U[:i, i]
                gx[:] -= xi * gcols[i]
            else:
                rec(i - 1, rem - used, tpart, zero_above)
        x[i] = 0

    if m == 1:
        # no recursion levels below the innermost
        g = L.gram[0][0]
        k = 1
        while g * k * k <= bound:
            out.append((g * k * k, (k,)))
            k += 1
        budget.charge(k)
    else:
        rec(m - 1, bound + 0.5, 0, True)
    out.sort()
    return out


def min_norm(L: EvenLattice, budget=None) -> int:
    """Smallest nonzero norm, by enumeration with a growing bound."""
    bound = 2
    while True:
        vs = short_vectors(L, bound, budget=budget)
        if vs:
            return L.norm(vs[0])
        bound *= 2


def norm_series(L: EvenLattice, bound: int, budget=None):
    """{norm: count of nonzero vectors} for even norms <= bound.

    Uses the structural model of catalog lattices (glue-extension coset
    series, products for direct sums) when available, so large bounds stay
    cheap; otherwise counts come from enumeration.
    """
    if bound % 2:
        raise ValueError("bound must be even")
    have = [b for b in L._series if b >= bound]
    if have:
        src = L._series[min(have)]
        return {n: c for n, c in src.items() if n <= bound}
    series = _norm_series_uncached(L, bound, budget)
    L._series[bound] = series
    return dict(series)


def _norm_series_uncached(L, bound, budget):
    if L.model is not None:
        kind = L.model[0]
        if kind == "dplus":
            full = _dplus_series(L.model[1], bound)
            return {n: c for n, c in full.items() if n > 0}
        if kind == "sum":
            a = norm_series(L.model[1], bound, budget)
            b = norm_series(L.model[2], bound, budget)
            out = {}
            fa = dict(a)
            fa[0] = 1
            fb = dict(b)
            fb[0] = 1
            for na, ca in fa.items():
                for nb, cb in fb.items():
                    n = na + nb
                    if 0 < n <= bound:
                        out[n] = out.get(n, 0) + ca * cb
            return out
    short_vectors(L, bound, budget=budget)
    counts = {}
    for n, _v in L._short[bound]:
        counts[n] = counts.get(n, 0) + 2
    return counts


def _dplus_series(n, bound):
    """Vector counts of the glue extension of D_n via one-dimensional
    coordinate series (exponents tracked in quarter-norm units)."""
    E = 4 * bound
    kmax = int(bound ** 0.5) + 2
    th3 = [0] * (E + 1)
    th4 = [0] * (E + 1)
    for k in range(-kmax, kmax + 1):
        e = 4 * k * k
        if e <= E:
            th3[e] += 1
            th4[e] += 1 if k % 2 == 0 else -1
    th2 = [0] * (E + 1)
    m = 0
    while (2 * m + 1) ** 2 <= E:
        th2[(2 * m + 1) ** 2] += 2
        m += 1

    def power(series, p):
        out = [1] + [0] * E
        base = list(series)
        while p:
            if p & 1:
                out = _convolve(out, base, E)
            p >>= 1
            if p:
                base = _convolve(base, base, E)
        return out

    t3 = power(th3, n)
    t4 = power(th4, n)
    t2 = power(th2, n)
    counts = {}
    for nrm in range(0, bound + 1, 2):
        total = t3[4 * nrm] + t4[4 * nrm] + t2[4 * nrm]
        counts[nrm] = total // 2
    return counts


def _convolve(a, b, E):
    out = [0] * (E + 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                if y and i + j <= E:
                    out[i + j] += x * y
    return out


def count_vectors_by_norm(L: EvenLattice, bound: int, budget=None) -> NormProfile:
    """Full +-counted table of vector counts for even norms up to bound."""
    if bound < 0:
        raise ValueError("bound must be >= 0")
    return NormProfile(bound, norm_series(L, bound, budget=budget))


def vector_classes(L: EvenLattice, max_norm: int, budget=None):
    """Sign-expanded short vectors grouped by norm, as int64 arrays.

    Returns ({norm: vectors}, {norm: vectors @ gram}); both orientations of
    each +-pair are present.  This is the working set for tuple enumeration.
    """
    if max_norm not in L._classes:
        short_vectors(L, max_norm, budget=ensure_budget(budget))
        grouped = {}
        for n, v in L._short[max_norm]:
            grouped.setdefault(n, []).append(v)
        G = np.array(L.gram, dtype=np.int64)
        out = {}
        for n, vs in grouped.items():
            arr = np.array(vs, dtype=np.int64)
            full = np.vstack([arr, -arr])
            out[n] = (full, full @ G)
        L._classes[max_norm] = out
    return L._classes[max_norm]
