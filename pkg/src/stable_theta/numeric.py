"""Complex evaluation of truncated expansions and direct theta sums.

Points live on the product of the degree-g upper half space (complex
symmetric tau with positive definite imaginary part) with complex h x g
matrices z.  All evaluators reduce the real part of tau into [0, 1) entrywise
first: with integral Fourier indices and even diagonals the summands are
invariant under integral symmetric translations of tau, so the reduction is
an exact identity and makes translation invariance hold bitwise.

Summation order is fixed (sorted canonical keys), so values are reproducible
across runs.  Double precision throughout; comparisons take explicit
tolerances from the caller (defaults documented per function).
"""

from __future__ import annotations

import math
from collections import namedtuple

import numpy as np

from .budget import ensure_budget
from .errors import BudgetExceededError, ShapeError
from .expansion import (JacobiExpansion, SiegelExpansion, key_bytes,
                        trace_of_flat, tri_len)
from .lattice import EvenLattice, is_even_unimodular, norm_series
from .theta import dense_tables, _assemble_siegel_terms

EvalResult = namedtuple("EvalResult", ["value", "tail"])


class SiegelJacobiPoint:
    """A point (tau, z): tau complex symmetric g x g with Im tau > 0, z h x g."""

    __slots__ = ("genus", "width", "tau", "z")

    def __init__(self, tau, z=None, tol=0.0):
        t = np.array(tau, dtype=np.complex128)
        if t.ndim == 0:
            t = t.reshape(1, 1)
        if t.ndim != 2 or t.shape[0] != t.shape[1]:
            raise ShapeError("tau must be square")
        if not np.array_equal(t, t.T):
            raise ShapeError("tau must be symmetric")
        if not in_siegel_upper_half(t, tol):
            raise ValueError("Im(tau) is not positive definite")
        self.genus = t.shape[0]
        self.tau = t
        if z is None:
            z = np.zeros((0, self.genus), dtype=np.complex128)
        zz = np.array(z, dtype=np.complex128)
        if zz.ndim != 2 or zz.shape[1] != self.genus:
            raise ShapeError("z must have g columns")
        self.width = zz.shape[0]
        self.z = zz

    def __repr__(self):
        return f"SiegelJacobiPoint(genus={self.genus}, width={self.width})"


def in_siegel_upper_half(tau, tol: float = 0.0) -> bool:
    """Leading principal minors of Im(tau) all exceed tol."""
    t = np.array(tau, dtype=np.complex128)
    if t.ndim == 0:
        t = t.reshape(1, 1)
    if t.ndim != 2 or t.shape[0] != t.shape[1]:
        raise ShapeError("tau must be square")
    if not np.array_equal(t, t.T):
        raise ShapeError("tau must be symmetric")
    y = t.imag
    for k in range(1, t.shape[0] + 1):
        if np.linalg.det(y[:k, :k]) <= tol:
            return False
    return True


def _reduced_tau(tau):
    """Subtract the entrywise floor of Re(tau); exact for integral indices."""
    re = tau.real
    return tau - np.floor(re)


def point_from_json(doc, width=None) -> SiegelJacobiPoint:
    """Build a point from {"tau_re": [[..]], "tau_im": [[..]], "z_re": .., "z_im": ..}."""
    try:
        tau = np.array(doc["tau_re"], dtype=float) + 1j * np.array(
            doc["tau_im"], dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise ShapeError(f"bad point document: {exc}") from exc
    z = None
    if "z_re" in doc or "z_im" in doc:
        try:
            z = np.array(doc["z_re"], dtype=float) + 1j * np.array(
                doc["z_im"], dtype=float)
        except (KeyError, TypeError, ValueError) as exc:
            raise ShapeError(f"bad point document: {exc}") from exc
    p = SiegelJacobiPoint(tau, z)
    if width is not None and p.width != width:
        raise ShapeError(f"point width {p.width} does not match {width}")
    return p


def _tau_pairing(flat, tau, g):
    """sum_{ij} (2T)_ij tau_ij off a flat lower-triangle key."""
    s = 0.0 + 0.0j
    k = 0
    for i in range(g):
        for j in range(i):
            s += 2.0 * flat[k] * tau[i, j]
            k += 1
        s += flat[k] * tau[i, i]
        k += 1
    return s


def eval_siegel_expansion(E: SiegelExpansion, p: SiegelJacobiPoint) -> EvalResult:
    """Partial sum of the stored terms at the point, plus a crude tail
    indicator: the largest magnitude among the highest-trace terms."""
    if E.genus != p.genus:
        raise ShapeError("genus mismatch")
    g = E.genus
    tau = _reduced_tau(p.tau)
    total = 0.0 + 0.0j
    tail = 0.0
    top = max((trace_of_flat(k, g) for k in E.terms), default=0)
    for key in E.sorted_keys():
        term = E.terms[key] * np.exp(1j * math.pi * _tau_pairing(key, tau, g))
        total += term
        if trace_of_flat(key, g) == top:
            tail = max(tail, abs(term))
    return EvalResult(complex(total), tail)


def eval_jacobi_expansion(F: JacobiExpansion, p: SiegelJacobiPoint) -> EvalResult:
    """Partial sum including the z-pairing exp(2 pi i sigma(R z))."""
    if F.genus != p.genus:
        raise ShapeError("genus mismatch")
    if F.width != p.width:
        raise ShapeError("width mismatch")
    g, h = F.genus, F.width
    tl = tri_len(g)
    tau = _reduced_tau(p.tau)
    z = p.z
    total = 0.0 + 0.0j
    tail = 0.0
    top = max((trace_of_flat(k[:tl], g) for k in F.terms), default=0)
    for key in F.sorted_keys():
        tkey, rkey = key[:tl], key[tl:]
        rz = sum(rkey[i * h + a] * z[a, i] for i in range(g) for a in range(h))
        term = F.terms[key] * np.exp(1j * math.pi * _tau_pairing(tkey, tau, g)
                                     + 2j * math.pi * rz)
        total += term
        if trace_of_flat(tkey, g) == top:
            tail = max(tail, abs(term))
    return EvalResult(complex(total), tail)


def eval_theta_direct(L: EvenLattice, g: int, p: SiegelJacobiPoint,
                      norm_bound: int, budget=None) -> complex:
    """Direct theta sum over all g-tuples with total norm <= norm_bound.

    Tuples are grouped by their doubled Gram matrix, summed in sorted key
    order.  Genus 1 uses the norm counts directly, so catalog lattices reach
    large bounds cheaply.
    """
    if norm_bound < 0 or norm_bound % 2:
        raise ValueError("norm bound must be even and nonnegative")
    if g < 0:
        raise ValueError("genus must be nonnegative")
    if p.genus != g:
        raise ShapeError("point genus mismatch")
    bud = ensure_budget(budget)
    tau = _reduced_tau(p.tau)
    if g == 0:
        return 1.0 + 0.0j
    if g == 1:
        q = np.exp(1j * math.pi * tau[0, 0])
        total = 1.0 + 0.0j
        series = norm_series(L, norm_bound, budget=bud)
        for n in sorted(series):
            total += series[n] * q ** n
        return complex(total)
    tables = dense_tables(L, min(g, norm_bound // 2), norm_bound, bud)
    terms = _assemble_siegel_terms(g, tables, bud)
    total = 0.0 + 0.0j
    for key in sorted(terms, key=lambda k: key_bytes(k, g)):
        total += terms[key] * np.exp(1j * math.pi * _tau_pairing(key, tau, g))
    return complex(total)


def _auto_norm_bound(L, y: float, tol: float, budget, cap: int = 512) -> int:
    """Smallest even bound whose estimated tail beats tol at Im tau = y.

    The term at norm n has magnitude count(n) * exp(-pi n y); once the last
    included term and a geometric continuation both fall below tol/8 the
    bound is accepted.  Raises when the cap cannot certify the tolerance.
    """
    bound = 8
    while bound <= cap:
        series = norm_series(L, bound, budget=budget)
        terms = {n: c * math.exp(-math.pi * n * y) for n, c in series.items()}
        ns = sorted(terms)
        if len(ns) >= 2:
            last = terms[ns[-1]]
            ratio = max(terms[ns[-1]] / max(terms[ns[-2]], 1e-300), 1e-6)
            if ratio < 0.5 and last / (1.0 - ratio) < tol / 8.0:
                return bound
        bound *= 2
    raise BudgetExceededError(
        f"cannot certify tolerance {tol} with norm bound <= {cap}")


def check_inversion_genus1(L: EvenLattice, tau: complex, tol: float = 1e-8,
                           budget=None) -> float:
    """|theta(-1/tau) - (tau/i)^(rank/2) theta(tau)| by direct summation.

    The summation bound is chosen automatically from tol and the smaller of
    the two imaginary parts.  Requires an even unimodular lattice of rank
    divisible by 8 (integral weight, trivial multiplier).
    """
    if not is_even_unimodular(L):
        raise ShapeError("inversion law requires an even unimodular lattice")
    if L.rank % 8:
        raise ShapeError("rank must be divisible by 8")
    tau = complex(tau)
    if tau.imag <= 0:
        raise ValueError("tau must lie in the upper half plane")
    bud = ensure_budget(budget)
    w = -1.0 / tau
    y = min(tau.imag, w.imag)
    bound = _auto_norm_bound(L, y, tol, bud)
    p1 = SiegelJacobiPoint([[tau]])
    p2 = SiegelJacobiPoint([[w]])
    v1 = eval_theta_direct(L, 1, p1, bound, bud)
    v2 = eval_theta_direct(L, 1, p2, bound, bud)
    factor = (tau / 1j) ** (L.rank // 2)
    return abs(v2 - factor * v1)


def check_translation_genus1(L: EvenLattice, tau: complex,
                             norm_bound: int = 16, budget=None) -> float:
    """|theta(tau+1) - theta(tau)| on truncated sums.

    Exactly zero: the Fourier indices are integral, so both evaluations
    reduce to the identical argument.
    """
    tau = complex(tau)
    bud = ensure_budget(budget)
    v1 = eval_theta_direct(L, 1, SiegelJacobiPoint([[tau]]), norm_bound, bud)
    v2 = eval_theta_direct(L, 1, SiegelJacobiPoint([[tau + 1.0]]), norm_bound, bud)
    return abs(v2 - v1)
