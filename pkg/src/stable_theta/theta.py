"""Coefficient engines: representation numbers and theta expansions.

The Fourier coefficient of a degree-g lattice theta series at an index T is
the number of ordered g-tuples of lattice vectors whose doubled Gram matrix
is 2T.  All engines below reduce to enumeration of such tuples:

  * tuples are enumerated column by column from sign-expanded short-vector
    lists, pruning on the remaining trace budget;
  * only "dense" tuples (every column nonzero) are enumerated; indices with
    zero diagonal entries force zero columns, so the full table is assembled
    by distributing dense tables over column supports;
  * the innermost column is batched with numpy, with exact integer products
    and bincount accumulation.

Orthogonal direct sums are convolved from their parts instead, which keeps
rank-24 members of the catalog cheap.  Every enumeration charges a node
budget and fails loudly rather than truncating.
"""

from __future__ import annotations

from itertools import combinations

import numpy as np

from .budget import ensure_budget
from .errors import ShapeError, UnsupportedError
from .expansion import (HalfIntegralMatrix, JacobiExpansion, JacobiIndex,
                        SiegelExpansion, tri_len, trace_of_flat)
from .intmat import is_positive_definite, is_psd
from .lattice import EvenLattice, vector_classes

_PROD_CACHE_MAX = 4_000_000  # entries per cached product matrix


def _theta_weight(rank: int) -> int:
    if rank % 2:
        raise ShapeError("theta expansions need even rank (integral weight)")
    return rank // 2


def _classes_upto(L, max_norm, budget):
    if max_norm < 2:
        return {}
    return {n: vw for n, vw in vector_classes(L, max_norm, budget).items()
            if n <= max_norm}


def _prod_rows(L, classes, na, ia, nb):
    """Products of vector ia of class na with every vector of class nb."""
    store = L._dense.setdefault("_pcache", {})
    key = (na, nb)
    if key in store:
        return store[key][ia]
    Va, Wa = classes[na]
    Vb, _ = classes[nb]
    if Va.shape[0] * Vb.shape[0] <= _PROD_CACHE_MAX:
        store[key] = Wa @ Vb.T
        return store[key][ia]
    return Wa[ia] @ Vb.T


def _dense_pair_table(L, classes, bound, budget):
    """Dense 2-column table {(a, t, b): count} via chunked exact matmuls."""
    tab = {}
    norms = sorted(classes)
    for ka, na in enumerate(norms):
        for nb in norms[ka:]:
            if na + nb > bound:
                break
            Va, Wa = classes[na]
            Vb, _ = classes[nb]
            rows, cols = Wa.shape[0], Vb.shape[0]
            budget.charge(rows * cols)
            off = int(np.ceil(np.sqrt(na * nb)))
            width = 2 * off + 1
            counts = np.zeros(width, dtype=np.int64)
            Wf = Wa.astype(np.float64)
            Vf = Vb.astype(np.float64).T
            chunk = max(1, 4_000_000 // max(cols, 1))
            for lo in range(0, rows, chunk):
                prods = (Wf[lo:lo + chunk] @ Vf).astype(np.int64)
                counts += np.bincount((prods + off).ravel(), minlength=width)
            for t_idx in np.nonzero(counts)[0].tolist():
                t = t_idx - off
                c = int(counts[t_idx])
                tab[(na, t, nb)] = tab.get((na, t, nb), 0) + c
                if na != nb:
                    tab[(nb, t, na)] = tab.get((nb, t, na), 0) + c
    return tab


def _dense_table(L, s, bound, budget):
    """Dense s-column table {flat lower triangle of 2T -> tuple count}."""
    if s == 0:
        return {(): 1}
    if s == 1:
        from .lattice import norm_series
        return {(n,): c for n, c in norm_series(L, bound, budget).items()}
    classes = _classes_upto(L, bound - 2 * (s - 1), budget)
    norms = sorted(classes)
    if s == 2:
        return _dense_pair_table(L, classes, bound, budget)

    span = 2 * bound + 1
    base = np.int64(span)
    tab = {}

    def innermost(chosen, key_prefix, rem):
        for nb in norms:
            if nb > rem:
                break
            Vb, _ = classes[nb]
            nvec = Vb.shape[0]
            budget.charge(nvec)
            enc = np.zeros(nvec, dtype=np.int64)
            for (na, ia) in chosen:
                enc *= base
                enc += _prod_rows(L, classes, na, ia, nb) + bound
            counts = np.bincount(enc, minlength=span ** len(chosen))
            for code in np.nonzero(counts)[0].tolist():
                c = int(counts[code])
                prods = []
                u = code
                for _ in range(len(chosen)):
                    prods.append(u % span - bound)
                    u //= span
                prods.reverse()
                key = key_prefix + tuple(prods) + (nb,)
                tab[key] = tab.get(key, 0) + c

    def descend(chosen, used, key_prefix):
        depth = len(chosen)
        rem = bound - used - 2 * (s - depth - 1)
        if depth == s - 1:
            innermost(chosen, key_prefix, rem)
            return
        for na in norms:
            if na > rem:
                break
            Va, _ = classes[na]
            budget.charge(Va.shape[0])
            for ia in range(Va.shape[0]):
                prods = tuple(int(_prod_rows(L, classes, nq, iq, na)[ia])
                              for (nq, iq) in chosen)
                descend(chosen + [(na, ia)], used + na,
                        key_prefix + prods + (na,))

    descend([], 0, ())
    return tab


def dense_tables(L: EvenLattice, smax: int, bound: int, budget=None):
    """Dense tuple tables for sizes 0..smax, cached per lattice.

    A table computed at a larger bound serves smaller bounds by filtering on
    the total norm (the count at a fixed key does not depend on the bound).
    """
    bud = ensure_budget(budget)
    out = {}
    for s in range(smax + 1):
        cached = L._dense.get(s)
        if cached is not None and cached[0] >= bound:
            cb, tab = cached
            if cb == bound:
                out[s] = tab
            else:
                out[s] = {k: v for k, v in tab.items()
                          if sum(k[i * (i + 3) // 2] for i in range(s)) <= bound}
        else:
            tab = _dense_table(L, s, bound, bud)
            L._dense[s] = (bound, tab)
            out[s] = tab
    return out


def _embed_positions(support, g):
    """Flat positions in the g x g lower triangle for a dense support."""
    pos = []
    for p, gp in enumerate(support):
        for q, gq in enumerate(support[:p + 1]):
            pos.append(gp * (gp + 1) // 2 + gq)
    return pos


def _assemble_siegel_terms(g, tables, budget):
    terms = {}
    tl = tri_len(g)
    smax = max(tables)
    for s in range(smax + 1):
        for support in combinations(range(g), s):
            pos = _embed_positions(support, g)
            budget.charge(len(tables[s]))
            for key, cnt in tables[s].items():
                flat = [0] * tl
                for p, v in zip(pos, key):
                    flat[p] = v
                terms[tuple(flat)] = cnt
    return terms


def _convolve_siegel(a: SiegelExpansion, b: SiegelExpansion, bound, budget):
    g = a.genus
    out = {}
    items_b = sorted(b.terms.items(),
                     key=lambda kv: trace_of_flat(kv[0], g))
    for k1, c1 in a.terms.items():
        t1 = trace_of_flat(k1, g)
        if t1 > bound:
            continue
        budget.charge(len(items_b))
        for k2, c2 in items_b:
            if t1 + trace_of_flat(k2, g) > bound:
                break
            k = tuple(x + y for x, y in zip(k1, k2))
            out[k] = out.get(k, 0) + c1 * c2
    return out


def siegel_theta(L: EvenLattice, g: int, bound: int, budget=None) -> SiegelExpansion:
    """Degree-g theta expansion of an even lattice, complete to trace <= bound.

    The coefficient at T counts ordered g-tuples of lattice vectors with
    doubled Gram matrix 2T; the constant term is 1 and the weight tag is
    rank/2.
    """
    if g < 0 or bound < 0:
        raise ValueError("genus and bound must be nonnegative")
    weight = _theta_weight(L.rank)
    bud = ensure_budget(budget)
    cache = L._dense.setdefault("_theta", {})
    if (g, bound) in cache:
        return cache[(g, bound)]
    if g == 0:
        exp = SiegelExpansion.constant_one(0, weight, bound)
    elif L.model is not None and L.model[0] == "sum":
        ea = siegel_theta(L.model[1], g, bound, bud)
        eb = siegel_theta(L.model[2], g, bound, bud)
        exp = SiegelExpansion(g, weight, bound,
                              _convolve_siegel(ea, eb, bound, bud))
    else:
        tables = dense_tables(L, min(g, bound), 2 * bound, bud)
        exp = SiegelExpansion(g, weight, bound,
                              _assemble_siegel_terms(g, tables, bud))
    cache[(g, bound)] = exp
    return exp


# ---------------------------------------------------------------------------
# Jacobi theta engines

def _as_index(M) -> JacobiIndex:
    if isinstance(M, JacobiIndex):
        return M
    if isinstance(M, EvenLattice):
        return JacobiIndex(M.gram)
    return JacobiIndex(M)


_INDEX_LATTICES: dict = {}


def _index_lattice(index: JacobiIndex) -> EvenLattice:
    """The lattice of the doubled index, shared so enumeration caches persist."""
    if index.doubled not in _INDEX_LATTICES:
        _INDEX_LATTICES[index.doubled] = EvenLattice(index.doubled)
    return _INDEX_LATTICES[index.doubled]


_JACOBI_CACHE: dict = {}
_JACOBI_CACHE_MAX = 4


def _jacobi_engine(S: EvenLattice, cmat, g, bound, budget) -> JacobiExpansion:
    """Expansion of the theta series with characteristic matrix c.

    Sums over integral (rank x g) matrices: the column tuple (x_1..x_g)
    contributes 1 to the coefficient at 2T = (x_p . S x_q) and R = (x_p . S c_j).
    """
    rank = S.rank
    rows = tuple(tuple(int(v) for v in row) for row in cmat)
    if len(rows) != rank:
        raise ShapeError(f"c must have {rank} rows")
    h = len(rows[0]) if rows else 0
    if any(len(r) != h for r in rows):
        raise ShapeError("ragged c matrix")
    weight = _theta_weight(rank)
    ind2 = [[sum(rows[a][i] * S.gram[a][b] * rows[b][j]
                 for a in range(rank) for b in range(rank))
             for j in range(h)] for i in range(h)]
    if not is_positive_definite(ind2):
        raise UnsupportedError(
            "semidefinite index is not supported; the index c^t S c must be "
            "positive definite")
    index = JacobiIndex(ind2)
    if g < 0 or bound < 0:
        raise ValueError("genus and bound must be nonnegative")
    cache_key = (S.gram, rows, g, bound)
    if cache_key in _JACOBI_CACHE:
        return _JACOBI_CACHE[cache_key]

    bud = ensure_budget(budget)
    carr = np.array(rows, dtype=np.int64)
    smax = min(g, bound)
    total = 2 * bound  # trace(T) <= bound means total vector norm <= 2*bound

    dense = {0: [((), ())]}  # s -> list of (flat dense 2T, flat dense R rows)
    for s in range(1, smax + 1):
        classes = _classes_upto(S, total - 2 * (s - 1), bud)
        norms = sorted(classes)
        wc = {n: w @ carr for n, (v, w) in classes.items()}
        dense[s] = _dense_jacobi_tuples(S, classes, norms, wc, s, total, bud)

    terms = {}
    tlg = tri_len(g)
    for s in range(smax + 1):
        for support in combinations(range(g), s):
            pos = _embed_positions(support, g)
            bud.charge(len(dense[s]))
            for tkey, rkey in dense[s]:
                flat = [0] * (tlg + g * h)
                for p, v in zip(pos, tkey):
                    flat[p] = v
                for p, gp in enumerate(support):
                    row = rkey[p * h:(p + 1) * h]
                    flat[tlg + gp * h: tlg + (gp + 1) * h] = row
                key = tuple(flat)
                terms[key] = terms.get(key, 0) + 1
    exp = JacobiExpansion(g, h, index, weight, bound, terms)
    while len(_JACOBI_CACHE) >= _JACOBI_CACHE_MAX:
        _JACOBI_CACHE.pop(next(iter(_JACOBI_CACHE)))
    _JACOBI_CACHE[cache_key] = exp
    return exp


def _dense_jacobi_tuples(S, classes, norms, wc, s, bound, budget):
    out = []

    def innermost(chosen, tprefix, rprefix, rem):
        for nb in norms:
            if nb > rem:
                break
            Vb, _ = classes[nb]
            nvec = Vb.shape[0]
            budget.charge(nvec)
            prods = [_prod_rows(S, classes, na, ia, nb) for (na, ia) in chosen]
            wrows = wc[nb]
            for i in range(nvec):
                tkey = tprefix + tuple(int(p[i]) for p in prods) + (nb,)
                out.append((tkey, rprefix + tuple(wrows[i].tolist())))

    def descend(chosen, used, tprefix, rprefix):
        depth = len(chosen)
        rem = bound - used - 2 * (s - depth - 1)
        if depth == s - 1:
            innermost(chosen, tprefix, rprefix, rem)
            return
        for na in norms:
            if na > rem:
                break
            Va, _ = classes[na]
            budget.charge(Va.shape[0])
            wrows = wc[na]
            for ia in range(Va.shape[0]):
                prods = tuple(int(_prod_rows(S, classes, nq, iq, na)[ia])
                              for (nq, iq) in chosen)
                descend(chosen + [(na, ia)], used + na,
                        tprefix + prods + (na,),
                        rprefix + tuple(wrows[ia].tolist()))

    descend([], 0, (), ())
    return out


def jacobi_theta(M, g: int, bound: int, budget=None) -> JacobiExpansion:
    """Expansion of the index-M Jacobi theta series, weight h/2.

    2M must be even and positive definite; coefficients are 0 or 1, and the
    summation matrix is recoverable from R via the inverse of 2M.
    """
    index = _as_index(M)
    S = M if isinstance(M, EvenLattice) else _index_lattice(index)
    ident = [[1 if i == j else 0 for j in range(index.width)]
             for i in range(index.width)]
    return _jacobi_engine(S, ident, g, bound, budget)


def theta_sc(S: EvenLattice, cmat, g: int, bound: int, budget=None) -> JacobiExpansion:
    """Jacobi theta series of an even unimodular S with characteristic c.

    The index is half of c^t S c and must be positive definite; the weight
    tag is rank(S)/2.
    """
    from .lattice import is_even_unimodular
    if not is_even_unimodular(S):
        raise ShapeError("S must be even unimodular")
    return _jacobi_engine(S, cmat, g, bound, budget)


# ---------------------------------------------------------------------------
# fixed-index representation numbers

def representation_count(L: EvenLattice, T, budget=None) -> int:
    """Number of ordered tuples of lattice vectors with doubled Gram 2T.

    Zero-diagonal positions force zero columns; the dense core is counted by
    constraint-filtered enumeration over short-vector classes.
    """
    if not isinstance(T, HalfIntegralMatrix):
        T = HalfIntegralMatrix(T)
    if not is_psd(T.doubled):
        return 0
    g = T.genus
    diag = [T.doubled[p][p] for p in range(g)]
    support = [p for p in range(g) if diag[p] > 0]
    for p in range(g):
        if diag[p] == 0 and any(T.doubled[p][q] for q in range(g)):
            return 0  # psd should preclude this, but stay safe
    if not support:
        return 1
    sub = [[T.doubled[p][q] for q in support] for p in support]
    bud = ensure_budget(budget)
    return _dense_rep_count(L, sub, bud)


def _dense_rep_count(L, t2, budget):
    g = len(t2)
    diag = [t2[p][p] for p in range(g)]
    classes = _classes_upto(L, max(diag), budget)
    for n in diag:
        if n not in classes:
            return 0
    arrs = [classes[n] for n in diag]
    if g == 1:
        return arrs[0][0].shape[0]
    if g == 4 and all(a[0].shape[0] <= 4096 for a in arrs):
        return _rep_count_bilinear4(L, classes, t2, budget)

    def eqrow(p, ip, q):
        return _prod_rows(L, classes, diag[p], ip, diag[q]) == t2[p][q]

    def rec(p, chosen):
        mask = eqrow(0, chosen[0], p)
        for q in range(1, p):
            mask &= eqrow(q, chosen[q], p)
        if p == g - 1:
            budget.charge(arrs[p][0].shape[0])
            return int(np.count_nonzero(mask))
        if p == g - 2:
            cand = np.nonzero(mask)[0]
            if cand.size == 0:
                return 0
            m_last = eqrow(0, chosen[0], g - 1)
            for q in range(1, p):
                m_last &= eqrow(q, chosen[q], g - 1)
            budget.charge(int(cand.size) * arrs[g - 1][0].shape[0])
            total = 0
            for i in cand.tolist():
                total += int(np.count_nonzero(eqrow(p, i, g - 1) & m_last))
            return total
        total = 0
        for i in np.nonzero(mask)[0].tolist():
            total += rec(p + 1, chosen + [i])
        return total

    budget.charge(arrs[0][0].shape[0])
    return sum(rec(1, [i1]) for i1 in range(arrs[0][0].shape[0]))


def _rep_count_bilinear4(L, classes, t2, budget):
    """Exact g=4 count via float64 BLAS; all intermediates stay below 2^53."""
    diag = [t2[p][p] for p in range(4)]
    prod = {}
    for p in range(4):
        for q in range(p + 1, 4):
            Va, Wa = classes[diag[p]]
            Vb, _ = classes[diag[q]]
            prod[(p, q)] = Wa @ Vb.T
    n1 = classes[diag[0]][0].shape[0]
    budget.charge(n1 * classes[diag[1]][0].shape[0])
    EQ12 = prod[(0, 1)] == t2[0][1]
    EQ13 = prod[(0, 2)] == t2[0][2]
    EQ14 = prod[(0, 3)] == t2[0][3]
    EQ23 = prod[(1, 2)] == t2[1][2]
    EQ24 = prod[(1, 3)] == t2[1][3]
    B34 = (prod[(2, 3)] == t2[2][3]).astype(np.float64)
    total = 0
    for i1 in range(n1):
        rows2 = np.nonzero(EQ12[i1])[0]
        if rows2.size == 0:
            continue
        M23 = EQ23[rows2].astype(np.float64)
        M24 = EQ24[rows2].astype(np.float64)
        C = M23.T @ M24
        u3 = EQ13[i1].astype(np.float64)
        u4 = EQ14[i1].astype(np.float64)
        total += int(round(u3 @ (C * B34) @ u4))
    return total
