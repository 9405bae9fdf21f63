"""Sparse exact Fourier expansions.

Siegel expansions are tables {T -> integer} over positive semidefinite
half-integral g x g matrices T with trace(T) <= bound; Jacobi expansions are
tables over pairs (T, R) with R an integral g x h matrix, subject to the
block condition that (T, R/2; R^t/2, M) is positive semidefinite for the
index M.  A half-integral matrix is stored exactly through its doubling
2T, an integer symmetric matrix with even diagonal.

Internally a term key is one flat tuple of ints: the row-major lower
triangle of 2T, followed (Jacobi case) by R in row-major order.  Absent keys
within the trace bound mean coefficient zero; zero coefficients are always
pruned, so table equality is plain dict equality.
"""

from __future__ import annotations

import json

from .errors import FormatError, ShapeError
from .intmat import det_int, is_psd, is_symmetric

# ---------------------------------------------------------------------------
# flat-key helpers

def tri_len(g: int) -> int:
    return g * (g + 1) // 2


def flatten_doubled(rows) -> tuple:
    """Row-major lower triangle of a symmetric integer matrix."""
    return tuple(rows[i][j] for i in range(len(rows)) for j in range(i + 1))


def unflatten_doubled(flat, g):
    """Inverse of flatten_doubled."""
    rows = [[0] * g for _ in range(g)]
    k = 0
    for i in range(g):
        for j in range(i + 1):
            rows[i][j] = rows[j][i] = flat[k]
            k += 1
    return tuple(tuple(r) for r in rows)


def trace_of_flat(flat, g) -> int:
    """trace(T) = trace(2T)/2 read off a flat key."""
    return sum(flat[i * (i + 3) // 2] for i in range(g)) // 2


class HalfIntegralMatrix:
    """A symmetric half-integral matrix T, stored as its doubling 2T."""

    __slots__ = ("genus", "doubled")

    def __init__(self, doubled):
        rows = tuple(tuple(int(x) for x in row) for row in doubled)
        if not is_symmetric(rows):
            raise ValueError("doubled matrix must be symmetric")
        if any(rows[i][i] % 2 for i in range(len(rows))):
            raise ValueError("doubled matrix must have even diagonal")
        self.genus = len(rows)
        self.doubled = rows

    @classmethod
    def zero(cls, g):
        return cls(tuple((0,) * g for _ in range(g)))

    @classmethod
    def from_flat(cls, flat, g):
        return cls(unflatten_doubled(flat, g))

    def flat(self) -> tuple:
        return flatten_doubled(self.doubled)

    def trace(self) -> int:
        return sum(self.doubled[i][i] for i in range(self.genus)) // 2

    def __eq__(self, other):
        return (isinstance(other, HalfIntegralMatrix)
                and self.doubled == other.doubled)

    def __hash__(self):
        return hash(self.doubled)

    def __repr__(self):
        return f"HalfIntegralMatrix(2T={self.doubled})"


class JacobiIndex:
    """A positive definite half-integral index M, stored as 2M."""

    __slots__ = ("width", "doubled", "_inv")

    def __init__(self, doubled):
        rows = tuple(tuple(int(x) for x in row) for row in doubled)
        if not is_symmetric(rows):
            raise ValueError("index doubling must be symmetric")
        if any(rows[i][i] % 2 for i in range(len(rows))):
            raise ValueError("index doubling must have even diagonal")
        self.width = len(rows)
        self.doubled = rows
        self._inv = None

    @classmethod
    def from_lattice(cls, L):
        return cls(L.gram)

    def is_unimodular(self) -> bool:
        return det_int(self.doubled) == 1

    def doubled_inverse(self):
        """Exact integer inverse of 2M (unimodular case only)."""
        if self._inv is None:
            from .intmat import inverse_unimodular
            self._inv = tuple(tuple(r) for r in inverse_unimodular(self.doubled))
        return self._inv

    def __eq__(self, other):
        return isinstance(other, JacobiIndex) and self.doubled == other.doubled

    def __hash__(self):
        return hash(self.doubled)

    def __repr__(self):
        return f"JacobiIndex(2M={self.doubled})"


def is_psd_half_integral(T: HalfIntegralMatrix) -> bool:
    """Exact psd test, performed on the doubling."""
    return is_psd(T.doubled)


def block_psd(T: HalfIntegralMatrix, R, M: JacobiIndex) -> bool:
    """Exact psd test of the block (T, R/2; R^t/2, M), on its doubling."""
    g, h = T.genus, M.width
    rows = tuple(tuple(int(x) for x in row) for row in R)
    if len(rows) != g or any(len(r) != h for r in rows):
        raise ShapeError(f"R must be {g}x{h}")
    return is_psd(_doubled_block(T.doubled, rows, M.doubled))


def _doubled_block(t2, r, m2):
    g, h = len(t2), len(m2)
    n = g + h
    B = [[0] * n for _ in range(n)]
    for i in range(g):
        for j in range(g):
            B[i][j] = t2[i][j]
        for j in range(h):
            B[i][g + j] = r[i][j]
            B[g + j][i] = r[i][j]
    for i in range(h):
        for j in range(h):
            B[g + i][g + j] = m2[i][j]
    return B


# ---------------------------------------------------------------------------
# canonical keys

def _fmt(entries):
    return ",".join(f"{int(v):+06d}" for v in entries)


def canonical_key(T: HalfIntegralMatrix, R=None) -> bytes:
    """Injective deterministic byte encoding of an index.

    Row-major lower triangle of 2T, then R row-major, each entry a
    fixed-width signed decimal, with separators between entries and blocks.
    """
    head = _fmt(flatten_doubled(T.doubled))
    if R is None:
        return head.encode("ascii")
    g = T.genus
    rows = tuple(tuple(int(x) for x in row) for row in R)
    if len(rows) != g:
        raise ShapeError(f"R must have {g} rows")
    body = _fmt(v for row in rows for v in row)
    return f"{head};{body}".encode("ascii")


def key_bytes(flat, g, h=None) -> bytes:
    """canonical_key for an internal flat key."""
    tl = tri_len(g)
    head = _fmt(flat[:tl])
    if h is None:
        return head.encode("ascii")
    return f"{head};{_fmt(flat[tl:])}".encode("ascii")


# ---------------------------------------------------------------------------
# expansions

class SiegelExpansion:
    """Truncated Fourier table of a degree-g Siegel form."""

    __slots__ = ("genus", "weight", "bound", "terms")

    def __init__(self, genus, weight, bound, terms):
        self.genus = int(genus)
        self.weight = int(weight)
        self.bound = int(bound)
        self.terms = {k: int(c) for k, c in terms.items() if c}

    @classmethod
    def zero(cls, genus, weight, bound):
        return cls(genus, weight, bound, {})

    @classmethod
    def constant_one(cls, genus, weight, bound):
        return cls(genus, weight, bound, {(0,) * tri_len(genus): 1})

    def is_zero(self) -> bool:
        return not self.terms

    def coefficient(self, T: HalfIntegralMatrix) -> int:
        if T.genus != self.genus:
            raise ShapeError("genus mismatch")
        if T.trace() > self.bound:
            raise ValueError("index beyond the truncation bound")
        return self.terms.get(T.flat(), 0)

    def sorted_keys(self):
        return sorted(self.terms, key=lambda k: key_bytes(k, self.genus))

    def __eq__(self, other):
        return (isinstance(other, SiegelExpansion)
                and self.genus == other.genus and self.weight == other.weight
                and self.bound == other.bound and self.terms == other.terms)

    def __repr__(self):
        return (f"SiegelExpansion(genus={self.genus}, weight={self.weight}, "
                f"bound={self.bound}, {len(self.terms)} terms)")


class JacobiExpansion:
    """Truncated Fourier table of a degree-g Jacobi form of width-h index."""

    __slots__ = ("genus", "width", "index", "weight", "bound", "terms")

    def __init__(self, genus, width, index, weight, bound, terms):
        self.genus = int(genus)
        self.width = int(width)
        self.index = index if isinstance(index, JacobiIndex) else JacobiIndex(index)
        if self.index.width != self.width:
            raise ShapeError("index degree differs from width")
        self.weight = int(weight)
        self.bound = int(bound)
        self.terms = {k: int(c) for k, c in terms.items() if c}

    @classmethod
    def zero(cls, genus, width, index, weight, bound):
        return cls(genus, width, index, weight, bound, {})

    def is_zero(self) -> bool:
        return not self.terms

    def split_key(self, key):
        """(flat 2T, flat R) parts of an internal key."""
        tl = tri_len(self.genus)
        return key[:tl], key[tl:]

    def coefficient(self, T: HalfIntegralMatrix, R) -> int:
        if T.genus != self.genus:
            raise ShapeError("genus mismatch")
        if T.trace() > self.bound:
            raise ValueError("index beyond the truncation bound")
        rows = tuple(tuple(int(x) for x in row) for row in R)
        if len(rows) != self.genus or any(len(r) != self.width for r in rows):
            raise ShapeError(f"R must be {self.genus}x{self.width}")
        key = T.flat() + tuple(v for row in rows for v in row)
        return self.terms.get(key, 0)

    def sorted_keys(self):
        return sorted(self.terms,
                      key=lambda k: key_bytes(k, self.genus, self.width))

    def __eq__(self, other):
        return (isinstance(other, JacobiExpansion)
                and self.genus == other.genus and self.width == other.width
                and self.index == other.index and self.weight == other.weight
                and self.bound == other.bound and self.terms == other.terms)

    def __repr__(self):
        return (f"JacobiExpansion(genus={self.genus}, width={self.width}, "
                f"weight={self.weight}, bound={self.bound}, "
                f"{len(self.terms)} terms)")


def linear_combine(coeffs, exps):
    """Integer linear combination of expansions sharing all metadata.

    The result bound is the minimum of the operand bounds; keys beyond it
    are dropped so the completeness contract still holds.  Zero coefficients
    are pruned.
    """
    if not exps or len(coeffs) != len(exps):
        raise ShapeError("need equally many coefficients and expansions")
    first = exps[0]
    jacobi = isinstance(first, JacobiExpansion)
    for e in exps[1:]:
        if isinstance(e, JacobiExpansion) != jacobi:
            raise ShapeError("cannot mix Siegel and Jacobi expansions")
        if e.genus != first.genus or e.weight != first.weight:
            raise ShapeError("mismatched genus or weight")
        if jacobi and (e.width != first.width or e.index != first.index):
            raise ShapeError("mismatched width or index")
    bound = min(e.bound for e in exps)
    acc = {}
    for c, e in zip(coeffs, exps):
        if not c:
            continue
        for k, v in e.terms.items():
            if trace_of_flat(k, first.genus) <= bound:
                acc[k] = acc.get(k, 0) + c * v
    acc = {k: v for k, v in acc.items() if v}
    if jacobi:
        return JacobiExpansion(first.genus, first.width, first.index,
                               first.weight, bound, acc)
    return SiegelExpansion(first.genus, first.weight, bound, acc)


# ---------------------------------------------------------------------------
# singular support

class SingularReport:
    """Outcome of a singular-support scan over a Jacobi expansion."""

    __slots__ = ("all_singular", "witness")

    def __init__(self, all_singular, witness=None):
        self.all_singular = bool(all_singular)
        self.witness = witness

    def __repr__(self):
        return f"SingularReport(all_singular={self.all_singular})"


def singular_support_check(F: JacobiExpansion) -> SingularReport:
    """Do all stored coefficients sit on the block-determinant-zero locus?

    For a unimodular index the determinant of the doubled block equals the
    determinant of the integer Schur complement 2T - R (2M)^-1 R^t, which is
    computed in exact int64 batches; otherwise the full block determinant is
    taken term by term.  The witness, if any, is the canonically first
    failing index.
    """
    g, h = F.genus, F.width
    tl = tri_len(g)
    if g == 0:
        # the empty block is the index matrix itself, never determinant zero
        bad = list(F.terms)
    elif F.index.is_unimodular() and g <= 3:
        bad = _schur_scan(F, g, h, tl)
    else:
        bad = []
        for key in F.terms:
            t2 = unflatten_doubled(key[:tl], g)
            r = [key[tl + i * h: tl + (i + 1) * h] for i in range(g)]
            if det_int(_doubled_block(t2, r, F.index.doubled)) != 0:
                bad.append(key)
    if not bad:
        return SingularReport(True, None)
    key = min(bad, key=lambda k: key_bytes(k, g, h))
    t2 = unflatten_doubled(key[:tl], g)
    r = tuple(tuple(key[tl + i * h: tl + (i + 1) * h]) for i in range(g))
    return SingularReport(False, (HalfIntegralMatrix(t2), r))


def _schur_scan(F, g, h, tl, chunk=200_000):
    """Keys with nonzero Schur determinant, exact int64, batched."""
    import numpy as np

    inv = np.array(F.index.doubled_inverse(), dtype=np.int64)
    bad = []
    keys = list(F.terms)
    for lo in range(0, len(keys), chunk):
        part = keys[lo:lo + chunk]
        flat = np.array(part, dtype=np.int64)
        r = flat[:, tl:].reshape(len(part), g, h)
        s = np.empty((len(part), g, g), dtype=np.int64)
        k = 0
        for i in range(g):
            for j in range(i + 1):
                s[:, i, j] = s[:, j, i] = flat[:, k]
                k += 1
        s -= np.einsum("nih,hk,njk->nij", r, inv, r)
        if g == 1:
            det = s[:, 0, 0]
        elif g == 2:
            det = s[:, 0, 0] * s[:, 1, 1] - s[:, 0, 1] * s[:, 1, 0]
        else:
            det = (s[:, 0, 0] * (s[:, 1, 1] * s[:, 2, 2] - s[:, 1, 2] * s[:, 2, 1])
                   - s[:, 0, 1] * (s[:, 1, 0] * s[:, 2, 2] - s[:, 1, 2] * s[:, 2, 0])
                   + s[:, 0, 2] * (s[:, 1, 0] * s[:, 2, 1] - s[:, 1, 1] * s[:, 2, 0]))
        for idx in np.nonzero(det)[0].tolist():
            bad.append(part[idx])
    return bad


# ---------------------------------------------------------------------------
# serialization

def serialize(E) -> str:
    """Deterministic JSON document for an expansion, newline-terminated."""
    if isinstance(E, JacobiExpansion):
        doc = {"kind": "jacobi", "genus": E.genus, "width": E.width,
               "index_gram_doubled": [list(r) for r in E.index.doubled],
               "weight": E.weight, "bound": E.bound,
               "terms": [_jacobi_term(E, k) for k in E.sorted_keys()]}
    elif isinstance(E, SiegelExpansion):
        doc = {"kind": "siegel", "genus": E.genus, "weight": E.weight,
               "bound": E.bound,
               "terms": [_siegel_term(E, k) for k in E.sorted_keys()]}
    else:
        raise TypeError("not an expansion")
    return json.dumps(doc, separators=(", ", ": ")) + "\n"


def _siegel_term(E, key):
    return {"T2": [list(r) for r in unflatten_doubled(key, E.genus)],
            "c": str(E.terms[key])}


def _jacobi_term(E, key):
    tl = tri_len(E.genus)
    h = E.width
    return {"T2": [list(r) for r in unflatten_doubled(key[:tl], E.genus)],
            "R": [list(key[tl + i * h: tl + (i + 1) * h])
                  for i in range(E.genus)],
            "c": str(E.terms[key])}


def deserialize(doc):
    """Parse and validate an expansion document (JSON text or dict)."""
    if isinstance(doc, (str, bytes)):
        try:
            doc = json.loads(doc)
        except json.JSONDecodeError as exc:
            raise FormatError(f"not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise FormatError("expansion document must be a JSON object")
    kind = doc.get("kind")
    if kind not in ("siegel", "jacobi"):
        raise FormatError(f"unknown kind {kind!r}")
    try:
        genus = int(doc["genus"])
        weight = int(doc["weight"])
        bound = int(doc["bound"])
        raw_terms = doc["terms"]
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"missing or malformed header field: {exc}") from exc
    if genus < 0 or bound < 0:
        raise FormatError("genus and bound must be nonnegative")
    if kind == "siegel":
        terms = {}
        for idx, term in enumerate(raw_terms):
            key, c = _load_term(term, idx, genus, bound, None, None)
            if c:
                terms[key] = c
        return SiegelExpansion(genus, weight, bound, terms)
    try:
        width = int(doc["width"])
        index = JacobiIndex(doc["index_gram_doubled"])
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"missing or malformed index field: {exc}") from exc
    terms = {}
    for idx, term in enumerate(raw_terms):
        key, c = _load_term(term, idx, genus, bound, width, index)
        if c:
            terms[key] = c
    return JacobiExpansion(genus, width, index, weight, bound, terms)


def _load_term(term, idx, genus, bound, width, index):
    where = f"terms[{idx}]"
    try:
        t2 = term["T2"]
        rows = tuple(tuple(int(x) for x in row) for row in t2)
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"{where}: bad T2: {exc}") from exc
    if len(rows) != genus or any(len(r) != genus for r in rows):
        raise FormatError(f"{where}: T2 must be {genus}x{genus}")
    if not is_symmetric(rows):
        raise FormatError(f"{where}: T2 not symmetric")
    if any(rows[i][i] % 2 for i in range(genus)):
        raise FormatError(f"{where}: odd diagonal in T2")
    T = HalfIntegralMatrix(rows)
    if T.trace() > bound:
        raise FormatError(f"{where}: trace {T.trace()} exceeds bound {bound}")
    try:
        c = int(term["c"])
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"{where}: bad coefficient: {exc}") from exc
    if width is None:
        if not is_psd(rows):
            raise FormatError(f"{where}: T2 is not positive semidefinite")
        return T.flat(), c
    try:
        r = tuple(tuple(int(x) for x in row) for row in term["R"])
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"{where}: bad R: {exc}") from exc
    if len(r) != genus or any(len(row) != width for row in r):
        raise FormatError(f"{where}: R must be {genus}x{width}")
    if not is_psd(_doubled_block(rows, r, index.doubled)):
        raise FormatError(f"{where}: block matrix is not positive semidefinite")
    return T.flat() + tuple(v for row in r for v in row), c
