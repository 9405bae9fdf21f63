"""Theta differences, the Igusa family, and stable product candidates.

The central object is the weight-8 stable family formed by the difference of
the two rank-16 even unimodular theta series.  Its members vanish for genus
up to three and the genus-4 member is a nonzero cusp form; the product of a
vanishing difference with a Jacobi theta series yields candidate stable
Jacobi families whose hypotheses (rank / minimal norm ratio, matching norm
profiles) are computed here exactly.
"""

from __future__ import annotations

import warnings
from itertools import product as _iproduct

from .budget import ensure_budget
from .errors import ShapeError
from .expansion import (HalfIntegralMatrix, JacobiExpansion, SiegelExpansion,
                        linear_combine)
from .intmat import det_int, is_psd
from .lattice import EvenLattice, catalog_lattice, min_norm, norm_series
from .operators import shimura_product
from .theta import _as_index, jacobi_theta, representation_count, siegel_theta


def theta_difference(P: EvenLattice, Q: EvenLattice, g: int, bound: int,
                     budget=None) -> SiegelExpansion:
    """Difference of the degree-g theta expansions of two equal-rank lattices."""
    if P.rank != Q.rank:
        raise ShapeError("theta difference needs equal ranks")
    bud = ensure_budget(budget)
    return linear_combine([1, -1], [siegel_theta(P, g, bound, bud),
                                    siegel_theta(Q, g, bound, bud)])


def igusa_form(g: int, bound: int, budget=None) -> SiegelExpansion:
    """The weight-8 difference theta(E8+E8) - theta(D16plus) in degree g.

    Zero keywise for g <= 3; the genus-4 member is a nonzero cusp form, with
    nonzero coefficients at indices whose doubled diagonal is (2,2,2,2).
    """
    return theta_difference(catalog_lattice("E8+E8"), catalog_lattice("D16plus"),
                            g, bound, budget)


class PairCondition:
    """Exact hypothesis data for a pair of equal-rank even unimodular forms."""

    __slots__ = ("rank", "mu_p", "mu_q", "mu_ok", "vanishing_case",
                 "profile_p", "profile_q")

    def __init__(self, rank, mu_p, mu_q, mu_ok, vanishing_case,
                 profile_p, profile_q):
        self.rank = rank
        self.mu_p = mu_p
        self.mu_q = mu_q
        self.mu_ok = mu_ok
        self.vanishing_case = vanishing_case
        self.profile_p = profile_p
        self.profile_q = profile_q

    def as_dict(self):
        return {"rank": self.rank, "mu_p": self.mu_p, "mu_q": self.mu_q,
                "mu_condition": self.mu_ok, "vanishing_case": self.vanishing_case,
                "norm_counts_p": dict(sorted(self.profile_p.items())),
                "norm_counts_q": dict(sorted(self.profile_q.items()))}

    def __repr__(self):
        return (f"PairCondition(rank={self.rank}, mu={min(self.mu_p, self.mu_q)}, "
                f"mu_condition={self.mu_ok}, case={self.vanishing_case})")


def pair_condition(P: EvenLattice, Q: EvenLattice, budget=None) -> PairCondition:
    """Norm profiles up to 4, minimal norms, and both pair verdicts."""
    if P.rank != Q.rank:
        raise ShapeError("pair conditions need equal ranks")
    bud = ensure_budget(budget)
    mu_p = min_norm(P, budget=bud)
    mu_q = min_norm(Q, budget=bud)
    mu_ok = P.rank <= 8 * min(mu_p, mu_q)
    prof_p = norm_series(P, 4, budget=bud)
    prof_q = norm_series(Q, 4, budget=bud)
    case = None
    n2p, n2q = prof_p.get(2, 0), prof_q.get(2, 0)
    n4p, n4q = prof_p.get(4, 0), prof_q.get(4, 0)
    if P.rank == 24 and n2p == n2q:
        case = 1
    elif P.rank == 32 and n2p == 0 and n2q == 0:
        case = 2
    elif P.rank == 48 and n2p == 0 and n2q == 0 and n4p == 0 and n4q == 0:
        case = 3
    return PairCondition(P.rank, mu_p, mu_q, mu_ok, case, prof_p, prof_q)


def mu_condition(P: EvenLattice, Q: EvenLattice, budget=None):
    """rank / min(minimal norms) <= 8, with the full pair detail."""
    detail = pair_condition(P, Q, budget)
    return detail.mu_ok, detail


def pair_vanishing_case(P: EvenLattice, Q: EvenLattice, budget=None):
    """First matching catalogued sufficient condition (1, 2 or 3), else None.

    Case 1: rank 24, same number of norm-2 vectors.  Case 2: rank 32, no
    norm-2 vectors.  Case 3: rank 48, no vectors of norm 2 or 4.
    """
    return pair_condition(P, Q, budget).vanishing_case


def schottky_jacobi_candidate(P: EvenLattice, Q: EvenLattice, M, g: int,
                              bound: int, budget=None) -> JacobiExpansion:
    """(theta_Q - theta_P) times the index-M Jacobi theta series.

    Weight (rank + width)/2.  A failing rank/min-norm hypothesis warns but
    still computes.  When the difference vanishes identically up to the
    bound, the zero expansion is returned without materializing the Jacobi
    factor.
    """
    index = _as_index(M)
    if det_int(index.doubled) != 1:
        raise ShapeError("index doubling must be even unimodular")
    bud = ensure_budget(budget)
    ok, detail = mu_condition(P, Q, bud)
    if not ok:
        warnings.warn(f"rank/min-norm hypothesis fails: {detail!r}",
                      stacklevel=2)
    diff = theta_difference(Q, P, g, bound, bud)
    h = index.width
    weight = diff.weight + h // 2
    if diff.is_zero():
        return JacobiExpansion.zero(g, h, index, weight, bound)
    return shimura_product(diff, jacobi_theta(index, g, bound, bud))


def igusa_genus4_witness(budget=None, max_candidates=64):
    """First index with doubled diagonal (2,2,2,2) where the two rank-16
    representation numbers differ.

    Candidates run over positive semidefinite doubled matrices with entries
    bounded by 2, ordered by decreasing determinant then lexicographically;
    counts come from constrained root-tuple enumeration.  Returns
    (HalfIntegralMatrix, count for E8+E8, count for D16plus).
    """
    bud = ensure_budget(budget)
    p16 = catalog_lattice("E8+E8")
    d16 = catalog_lattice("D16plus")
    candidates = []
    for off in _iproduct(range(-2, 3), repeat=6):
        t12, t13, t14, t23, t24, t34 = off
        rows = ((2, t12, t13, t14), (t12, 2, t23, t24),
                (t13, t23, 2, t34), (t14, t24, t34, 2))
        if is_psd(rows):
            candidates.append((-det_int(rows), off, rows))
    candidates.sort()
    for _negdet, _off, rows in candidates[:max_candidates]:
        T = HalfIntegralMatrix(rows)
        c1 = representation_count(p16, T, bud)
        c2 = representation_count(d16, T, bud)
        if c1 != c2:
            return T, c1, c2
    raise RuntimeError("no discrepant index found within the candidate cap")
