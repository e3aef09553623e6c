"""Sum capacities: exhaustive maxima over vertex sets and closed-form bounds.

The sum rate is convex in the encoding, so a capacity over a polytope is the
largest sum rate among its vertices.  Vertices are first collapsed to their
rate keys (the affine dependence of each receiver's per-message marginal on
p and q), which leaves only a few hundred distinct functions to evaluate.
"""
import math
from dataclasses import dataclass

import numpy as np

from nscap.channel import (RATE_KEY_MATRIX, ChannelParams, binary_entropy,
                           rates_from_keys)
from nscap.errors import DomainError

GRID_SIZE = 101
TIE_TOL = 1e-12
FUNC_TOL = 1e-9
GRAY_TOL = 1e-9
TSIRELSON_WEIGHT = (2 + math.sqrt(2)) / 4


def make_grid(n_p=GRID_SIZE, n_q=None):
    """Uniform mesh over [0, 1]^2 as two ``(n_p, n_q)`` arrays."""
    n_q = n_p if n_q is None else n_q
    if n_p < 2 or n_q < 2:
        raise DomainError("grid dimensions must be at least 2")
    return np.meshgrid(np.linspace(0, 1, n_p), np.linspace(0, 1, n_q), indexing="ij")


def _h(t):
    return binary_entropy(np.clip(t, 0.0, 1.0))


# ----------------------------------------------------------- closed forms

def _f_local(p, q):
    return 2 * _h((2 + p - q) / 4) - _h((p + q) / 2) - _h(p)


def _f_lower(p, q):
    return 2 - 2 * _h(TSIRELSON_WEIGHT * p + (1 - TSIRELSON_WEIGHT) * q)


def _g_upper(p, q):
    return 1 + _h((2 + p) / 5) - 0.5 * _h((1 + 3 * p) / 5) - 1.5 * _h(p)


def _f_upper(p, q):
    return 2 * _h((5 + p - q) / 10) - _h((4 * p + q) / 5) - _h(p)


def _as_pq(p, q):
    p, q = np.broadcast_arrays(np.asarray(p, dtype=float), np.asarray(q, dtype=float))
    if np.any((p < 0) | (p > 1) | (q < 0) | (q > 1)):
        raise DomainError("p and q must lie in [0, 1]")
    return p, q


def _scalar(v):
    return float(v) if np.ndim(v) == 0 else v


def local_capacity_formula(p, q):
    p, q = _as_pq(p, q)
    return _scalar(np.maximum.reduce([1 - _h(p), 1 - _h(q), _f_local(p, q), _f_local(q, p)]))


def ns_capacity_formula(p, q):
    p, q = _as_pq(p, q)
    return _scalar(np.maximum(2 * (1 - _h(p)), 2 * (1 - _h(q))))


def qlb_formula(p, q):
    """Lower bound on the quantum capacity from the Tsirelson correlation."""
    p, q = _as_pq(p, q)
    return _scalar(np.maximum.reduce([1 - _h(p), 1 - _h(q), _f_lower(p, q), _f_lower(q, p)]))


def qub_formula(p, q):
    """Upper bound on the quantum capacity from the cropped no-signaling polytope."""
    p, q = _as_pq(p, q)
    return _scalar(np.maximum.reduce([_g_upper(p, q), _g_upper(q, p),
                                      _f_upper(p, q), _f_upper(q, p)]))


# ------------------------------------------------------- vertex-set scans

@dataclass(frozen=True)
class RateTable:
    """Distinct rate keys of a vertex set.

    ``keys / scale`` are the (const, p, q) coefficients of P(Y1=1|m1=0),
    P(Y1=1|m1=1), P(Y2=1|m2=0), P(Y2=1|m2=1); ``first[k]`` is the lowest
    vertex index with key ``k`` and ``inverse[i]`` the key of vertex ``i``.
    """

    keys: np.ndarray
    scale: int
    first: np.ndarray
    inverse: np.ndarray

    def rates(self, p, q):
        return rates_from_keys(self.keys, self.scale, p, q)


def rate_table(vs):
    cached = getattr(vs, "_rate_table", None)
    if cached is not None:
        return cached
    if len(vs) == 0:
        raise DomainError("empty vertex set")
    big = int(np.lcm.reduce(vs.den))
    raw = vs.num @ RATE_KEY_MATRIX
    keys = raw * (big // vs.den)[:, None]
    uniq, first, inverse = np.unique(keys, axis=0, return_index=True, return_inverse=True)
    table = RateTable(uniq, 2 * big, first, inverse.reshape(-1))
    vs._rate_table = table
    return table


@dataclass(frozen=True)
class CapacityResult:
    value: float
    argmax_vertex: int
    params: ChannelParams


def capacity_over_set(vs, params):
    """Largest sum rate over the vertices of ``vs``; ties go to the lowest index."""
    if len(vs) == 0:
        raise DomainError("capacity over an empty vertex set")
    params = params if isinstance(params, ChannelParams) else ChannelParams(*params)
    table = rate_table(vs)
    rates = table.rates(params.p, params.q)
    best = rates.max()
    tied = np.nonzero(rates >= best - TIE_TOL)[0]
    winner = int(table.first[tied].min())
    return CapacityResult(float(best), winner, params)


def capacity_grid(vs, p, q, chunk=256):
    """Capacity over ``vs`` at every point of the (p, q) arrays."""
    table = rate_table(vs)
    p, q = _as_pq(p, q)
    best = np.full(p.shape, -np.inf)
    for start in range(0, len(table.keys), chunk):
        r = rates_from_keys(table.keys[start:start + chunk], table.scale, p, q)
        best = np.maximum(best, r.max(axis=0))
    return best


def distinct_sumrate_functions(vs, grid, tol=FUNC_TOL, drop_dominated=True):
    """One vertex index per distinct sum-rate function of (p, q).

    Functions are compared through their values on ``grid`` (a pair of
    arrays).  With ``drop_dominated`` the representatives whose values never
    exceed the maximum of the remaining ones are removed as well.
    """
    p, q = _as_pq(*grid)
    if p.size == 0:
        raise DomainError("empty grid")
    table = rate_table(vs)
    order = np.argsort(table.first)
    fp = rates_from_keys(table.keys[order], table.scale, p.ravel(), q.ravel())
    reps = []
    for k in range(len(order)):
        if reps and np.any(np.max(np.abs(fp[reps] - fp[k]), axis=1) <= tol):
            continue
        reps.append(k)
    if drop_dominated:
        kept = list(reps)
        for k in sorted(reps, key=lambda r: fp[r].sum()):
            others = [r for r in kept if r != k]
            if others and np.all(fp[k] <= fp[others].max(axis=0) + tol):
                kept.remove(k)
        reps = kept
    return [int(table.first[order[k]]) for k in reps]


# -------------------------------------------------------- hierarchy scan

@dataclass(frozen=True)
class HierarchyCell:
    params: ChannelParams
    c_local: float
    c_ns: float
    c_qlb: float
    c_qub: float
    in_gray_region: bool


def hierarchy_arrays(p, q):
    """Vectorized capacity columns and the gray-region mask."""
    p, q = _as_pq(p, q)
    cl = np.asarray(local_capacity_formula(p, q))
    cn = np.asarray(ns_capacity_formula(p, q))
    clb = np.asarray(qlb_formula(p, q))
    cub = np.asarray(qub_formula(p, q))
    gray = (clb > cl + GRAY_TOL) & (cub < cn - GRAY_TOL)
    return cl, cn, clb, cub, gray


def hierarchy_scan(grid):
    """One :class:`HierarchyCell` per grid point, row-major over the arrays."""
    p, q = (np.asarray(g, dtype=float).ravel() for g in grid)
    cl, cn, clb, cub, gray = hierarchy_arrays(p, q)
    return [HierarchyCell(ChannelParams(float(p[i]), float(q[i])), float(cl[i]),
                          float(cn[i]), float(clb[i]), float(cub[i]), bool(gray[i]))
            for i in range(len(p))]
