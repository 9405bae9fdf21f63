"""Degree-lowering operators and the product structure on expansions.

At the Fourier level the degree-lowering operator keeps exactly the indices
whose last row and column vanish (positive semidefiniteness forces the whole
row to vanish once the corner does) and strips them, so no limit computation
is needed; the Jacobi variant also requires the last row of R to vanish.
Both are exact index restrictions on the coefficient tables.
"""

from __future__ import annotations

from bisect import bisect_right

from .errors import ShapeError
from .expansion import (JacobiExpansion, SiegelExpansion, key_bytes,
                        trace_of_flat, tri_len)


def siegel_phi(E: SiegelExpansion) -> SiegelExpansion:
    """Degree-lowering operator: genus drops by one, weight and bound persist."""
    if E.genus < 1:
        raise ShapeError("cannot lower a genus-0 expansion")
    g = E.genus
    tl = tri_len(g - 1)
    terms = {}
    for key, c in E.terms.items():
        if any(key[tl:]):
            continue
        terms[key[:tl]] = c
    return SiegelExpansion(g - 1, E.weight, E.bound, terms)


def siegel_jacobi_psi(F: JacobiExpansion) -> JacobiExpansion:
    """Jacobi degree-lowering operator: restriction to indices with vanishing
    last row/column of T and vanishing last row of R."""
    if F.genus < 1:
        raise ShapeError("cannot lower a genus-0 expansion")
    g, h = F.genus, F.width
    tl_old, tl_new = tri_len(g), tri_len(g - 1)
    terms = {}
    for key, c in F.terms.items():
        tkey, rkey = key[:tl_old], key[tl_old:]
        if any(tkey[tl_new:]) or any(rkey[(g - 1) * h:]):
            continue
        terms[tkey[:tl_new] + rkey[:(g - 1) * h]] = c
    return JacobiExpansion(g - 1, h, F.index, F.weight, F.bound, terms)


def shimura_product(f: SiegelExpansion, F: JacobiExpansion) -> JacobiExpansion:
    """Series product of a Siegel expansion with a Jacobi expansion.

    Coefficient convolution over splittings T = T1 + T2 with the R part
    carried along; complete to the minimum of the operand bounds, weight
    tags add.
    """
    if not isinstance(f, SiegelExpansion) or not isinstance(F, JacobiExpansion):
        raise ShapeError("expected a Siegel factor and a Jacobi factor")
    if f.genus != F.genus:
        raise ShapeError("genus mismatch between the factors")
    g, h = F.genus, F.width
    bound = min(f.bound, F.bound)
    tl = tri_len(g)
    jacobi_items = sorted(((trace_of_flat(k[:tl], g), k, c)
                           for k, c in F.terms.items()), key=lambda it: it[0])
    traces = [t for t, _, _ in jacobi_items]
    out = {}
    for k1, c1 in f.terms.items():
        t1 = trace_of_flat(k1, g)
        if t1 > bound:
            continue
        stop = bisect_right(traces, bound - t1)
        for t2, k2, c2 in jacobi_items[:stop]:
            key = tuple(a + b for a, b in zip(k1, k2[:tl])) + k2[tl:]
            out[key] = out.get(key, 0) + c1 * c2
    return JacobiExpansion(g, h, F.index, f.weight + F.weight, bound, out)


class StepResult:
    """One degree-lowering comparison inside a family check."""

    __slots__ = ("from_genus", "to_genus", "passed", "witness")

    def __init__(self, from_genus, to_genus, passed, witness=None):
        self.from_genus = from_genus
        self.to_genus = to_genus
        self.passed = passed
        self.witness = witness

    def as_dict(self):
        return {"from": self.from_genus, "to": self.to_genus,
                "pass": self.passed, "witness": self.witness}


class StableFamilyReport:
    """Verdicts of the degree-lowering checks across a family of expansions."""

    __slots__ = ("kind", "genera", "bound", "steps")

    def __init__(self, kind, genera, bound, steps):
        self.kind = kind
        self.genera = genera
        self.bound = bound
        self.steps = steps

    @property
    def all_pass(self) -> bool:
        return all(s.passed for s in self.steps)

    def as_dict(self):
        return {"kind": self.kind, "genera": self.genera, "bound": self.bound,
                "steps": [s.as_dict() for s in self.steps]}

    def __repr__(self):
        verdict = "pass" if self.all_pass else "fail"
        return f"StableFamilyReport({self.kind}, genera={self.genera}, {verdict})"


def _first_discrepancy(a, b, genus, width):
    keys = set(a) | set(b)
    for key in sorted(keys, key=lambda k: key_bytes(k, genus, width)):
        if a.get(key, 0) != b.get(key, 0):
            return key_bytes(key, genus, width).decode("ascii")
    return None


def verify_stable(family, kind: str) -> StableFamilyReport:
    """Check that each member maps to the next lower one under the
    degree-lowering operator, keywise up to the common bound."""
    if kind not in ("siegel", "jacobi"):
        raise ShapeError(f"unknown family kind {kind!r}")
    want = JacobiExpansion if kind == "jacobi" else SiegelExpansion
    if not family or not all(isinstance(e, want) for e in family):
        raise ShapeError(f"family must be nonempty {kind} expansions")
    members = sorted(family, key=lambda e: e.genus)
    genera = [e.genus for e in members]
    if any(b - a != 1 for a, b in zip(genera, genera[1:])):
        raise ShapeError(f"family genera must be consecutive, got {genera}")
    first = members[0]
    for e in members[1:]:
        if e.weight != first.weight or e.bound != first.bound:
            raise ShapeError("family members must share weight and bound")
        if kind == "jacobi" and (e.width != first.width or e.index != first.index):
            raise ShapeError("family members must share width and index")
    lower = siegel_phi if kind == "siegel" else siegel_jacobi_psi
    steps = []
    for hi, lo in zip(members[1:], members[:-1]):
        image = lower(hi)
        passed = image.terms == lo.terms
        witness = None
        if not passed:
            witness = _first_discrepancy(
                image.terms, lo.terms, lo.genus,
                lo.width if kind == "jacobi" else None)
        steps.append(StepResult(hi.genus, lo.genus, passed, witness))
    return StableFamilyReport(kind, genera, first.bound, steps)
