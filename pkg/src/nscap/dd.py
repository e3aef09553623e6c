"""Exact vertex enumeration by the double-description method.

The equalities are solved first (exact Gauss-Jordan over the rationals), so
the polytope lives in a chart of free coordinates ``z``.  The inequalities
are homogenized to a cone in ``(z, t)`` and inserted one at a time; the
extreme rays are integer vectors kept in lowest terms, and new rays come
from adjacent (+, -) pairs found with the combinatorial zero-set test.
Rays with ``t > 0`` are the vertices.
"""
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from nscap import kernels
from nscap.errors import DomainError, GeometryError

_INT_LIMIT = 2**62


@dataclass(frozen=True)
class HPolytope:
    """``{P : E P = e, A P <= b}`` with exact rational rows.

    ``equalities`` and ``inequalities`` are tuples of ``(coefficients, rhs)``.
    """

    equalities: tuple
    inequalities: tuple

    def __post_init__(self):
        def norm(rows):
            out = []
            for coeffs, rhs in rows:
                out.append((tuple(Fraction(c) for c in coeffs), Fraction(rhs)))
            return tuple(out)

        eq, ineq = norm(self.equalities), norm(self.inequalities)
        lengths = {len(c) for c, _ in eq + ineq}
        if len(lengths) > 1:
            raise DomainError("all rows need the same number of coefficients")
        object.__setattr__(self, "equalities", eq)
        object.__setattr__(self, "inequalities", ineq)

    @property
    def dim(self):
        rows = self.equalities + self.inequalities
        return len(rows[0][0]) if rows else 0

    def with_equality(self, coeffs, rhs):
        return HPolytope(self.equalities + ((tuple(coeffs), rhs),), self.inequalities)

    def equality_rank(self):
        return len(_rref([list(c) + [r] for c, r in self.equalities])[1])

    def affine_dimension(self):
        """Dimension of the affine hull of the equalities (not of the polytope)."""
        return self.dim - len(_rref([list(c) for c, _ in self.equalities])[1])

    def _integer_rows(self, rows):
        mat, rhs = [], []
        for coeffs, r in rows:
            scale = math.lcm(*(c.denominator for c in coeffs), r.denominator)
            mat.append([int(c * scale) for c in coeffs])
            rhs.append(int(r * scale))
        return (np.array(mat, dtype=object).reshape(len(rows), self.dim),
                np.array(rhs, dtype=object))

    def check_points(self, num, den):
        """Exact row checks for points ``num[k] / den[k]``.

        Returns ``(equalities_ok, inequalities_ok)`` boolean arrays.
        """
        num = np.asarray(num, dtype=object)
        den = np.asarray(den, dtype=object)
        out = []
        for rows, is_eq in ((self.equalities, True), (self.inequalities, False)):
            if not rows:
                out.append(np.ones(len(num), dtype=bool))
                continue
            mat, rhs = self._integer_rows(rows)
            lhs = num @ mat.T
            bound = den[:, None] * rhs[None, :]
            ok = (lhs == bound) if is_eq else (lhs <= bound)
            out.append(np.all(ok, axis=1))
        return out[0], out[1]


# ------------------------------------------------------------ exact algebra

def _rref(rows):
    """Reduced row echelon form over Fractions; returns (rows, pivot columns)."""
    m = [[Fraction(v) for v in row] for row in rows]
    pivots = []
    r = 0
    ncols = len(m[0]) if m else 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = 1 / m[r][c]
        m[r] = [v * inv for v in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def _chart(equalities, n):
    """Solve the equalities: returns ``(x0, N, free)`` with ``x = x0 + N z``."""
    if not equalities:
        eye = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
        return [Fraction(0)] * n, eye, list(range(n))
    red, pivots = _rref([list(c) + [r] for c, r in equalities])
    if n in pivots:
        raise GeometryError("equalities are inconsistent")
    free = [c for c in range(n) if c not in pivots]
    x0 = [Fraction(0)] * n
    N = [[Fraction(0)] * len(free) for _ in range(n)]
    for row, p in zip(red, pivots):
        x0[p] = row[n]
        for k, f in enumerate(free):
            N[p][k] = -row[f]
    for k, f in enumerate(free):
        N[f][k] = Fraction(1)
    return x0, N, free


def _integer_row(values):
    scale = math.lcm(*(v.denominator for v in values))
    ints = [int(v * scale) for v in values]
    g = math.gcd(*ints)
    return [v // g for v in ints] if g else ints


def _as_array(rows):
    arr = np.array(rows, dtype=object)
    if arr.size and max(abs(int(v)) for v in arr.flat) < _INT_LIMIT:
        return arr.astype(np.int64)
    return arr


def _reduce(rays):
    """Divide every row by the gcd of its entries."""
    if rays.dtype == object:
        g = np.array([math.gcd(*row) for row in rays.tolist()], dtype=object)
    else:
        g = np.gcd.reduce(rays, axis=1)
    g[g == 0] = 1
    return rays // g[:, None]


def _bits(n_rows):
    return (n_rows + 63) // 64


def _set_bit(masks, rows, k):
    masks[rows, k >> 6] |= np.uint64(1) << np.uint64(k & 63)


def _safe_product(a, b):
    """Whether products of entries of ``a`` and ``b`` stay within int64."""
    if a.dtype == object or b.dtype == object:
        return False
    ma = int(np.abs(a).max(initial=0))
    mb = int(np.abs(b).max(initial=0))
    return ma * mb * max(a.shape[-1], 1) < _INT_LIMIT


def _dot(R, g):
    if _safe_product(R, g):
        return R @ g
    return R.astype(object) @ g.astype(object)


# --------------------------------------------------------------- DD core

@dataclass
class DDStats:
    dimension: int
    constraints: int
    max_rays: int = 0
    rays_per_step: list = None


def cone_rows(hp):
    """Integer rows ``G`` of the homogenized cone ``G (z, t) >= 0`` and the chart."""
    n = hp.dim
    x0, N, free = _chart(hp.equalities, n)
    d = len(free)
    rows = [[Fraction(0)] * d + [Fraction(1)]]  # t >= 0
    for coeffs, rhs in hp.inequalities:
        # coeffs . (x0 + N z) <= rhs  ->  (rhs - coeffs . x0) t - (coeffs N) z >= 0
        cz = [-sum(coeffs[i] * N[i][k] for i in range(n) if coeffs[i] and N[i][k])
              for k in range(d)]
        const = rhs - sum(c * v for c, v in zip(coeffs, x0) if c and v)
        rows.append(cz + [const])
    G = np.array([_integer_row(r) for r in rows], dtype=object)
    return _as_array(G.tolist()), (x0, N, free)


def _initial_cone(G):
    """First maximal independent row set in order and the rays of its cone."""
    D = G.shape[1]
    echelon, chosen = [], []  # (pivot column, reduced row)
    for k in range(len(G)):
        row = [Fraction(int(v)) for v in G[k]]
        for c, base in echelon:
            if row[c]:
                f = row[c]
                row = [a - f * b for a, b in zip(row, base)]
        piv = next((c for c in range(D) if row[c]), None)
        if piv is None:
            continue
        inv = 1 / row[piv]
        echelon.append((piv, [v * inv for v in row]))
        chosen.append(k)
        if len(chosen) == D:
            break
    if len(chosen) < D:
        raise GeometryError("the constraint cone has a lineality space: polytope is unbounded")
    # columns of B^{-1} are the extreme rays of {w : B w >= 0}
    aug = [[Fraction(int(v)) for v in G[k]] + [Fraction(int(i == j)) for j in range(D)]
           for i, k in enumerate(chosen)]
    red, _ = _rref(aug)
    inv = [row[D:] for row in red]
    rays = [_integer_row([inv[i][k] for i in range(D)]) for k in range(D)]
    return chosen, _as_array(rays)


def double_description(G, stats=None):
    """Extreme rays of the pointed cone ``{w : G w >= 0}`` (integer rows)."""
    D = G.shape[1]
    W = _bits(len(G))
    chosen, R = _initial_cone(G)
    masks = np.zeros((D, W), dtype=np.uint64)
    for k, row in enumerate(chosen):
        others = [r for r in range(D) if r != k]
        _set_bit(masks, others, row)
    min_common = D - 2
    done = set(chosen)
    for row in range(len(G)):
        if row in done:
            continue
        g = G[row]
        s = _dot(R, g)
        plus = np.nonzero(s > 0)[0]
        minus = np.nonzero(s < 0)[0]
        zero = np.nonzero(s == 0)[0]
        if len(minus):
            pi, mj = kernels.adjacent_pairs(masks, plus, minus, min_common)
            sp = s[pi][:, None]
            sm = s[mj][:, None]
            if _safe_product(np.abs(s).reshape(-1, 1), R):
                new = sp * R[mj] - sm * R[pi]
            else:
                new = (sp.astype(object) * R[mj].astype(object)
                       - sm.astype(object) * R[pi].astype(object))
            new = _reduce(new)
            if new.dtype == object and len(new):
                new = _as_array(new.tolist())
            new_masks = masks[pi] & masks[mj]
            keep = np.concatenate([plus, zero])
            kept = R[keep]
            if kept.dtype != new.dtype:
                kept, new = kept.astype(object), new.astype(object)
            R = np.concatenate([kept, new.reshape(-1, D)])
            masks = np.concatenate([masks[keep], new_masks])
            _set_bit(masks, np.r_[np.arange(len(plus), len(keep)),
                                  np.arange(len(keep), len(R))].astype(np.int64), row)
        else:
            _set_bit(masks, zero, row)
        if stats is not None:
            stats.max_rays = max(stats.max_rays, len(R))
            stats.rays_per_step.append(len(R))
    return R


def enumerate_vertices(hp, stats=None):
    """All vertices of ``hp`` as integer ``(num, den)`` arrays (rows not deduplicated)."""
    if hp.dim == 0:
        raise DomainError("empty system")
    G, (x0, N, free) = cone_rows(hp)
    d = len(free)
    if stats is not None:
        stats.dimension = d
        stats.constraints = len(G)
        stats.rays_per_step = []
    if d == 0:
        scale = math.lcm(*(v.denominator for v in x0))
        num = np.array([[int(v * scale) for v in x0]], dtype=np.int64)
        if not hp.check_points(num, [scale])[1][0]:
            raise GeometryError("the system is infeasible")
        return num, np.array([scale], dtype=np.int64)
    R = double_description(G, stats)
    t = R[:, d]
    if not np.any(t > 0):
        raise GeometryError("the system is infeasible")
    if np.any(t == 0):
        raise GeometryError("polytope is unbounded (recession rays found)")
    # x = x0 + N z with z = R[:, :d] / t; integer form over a common chart scale
    scale = math.lcm(*(v.denominator for v in x0),
                     *(v.denominator for row in N for v in row))
    X0 = np.array([int(v * scale) for v in x0], dtype=object)
    NN = np.array([[int(v * scale) for v in row] for row in N], dtype=object)
    Z = R[:, :d].astype(object)
    num = t.astype(object)[:, None] * X0[None, :] + Z @ NN.T
    den = t.astype(object) * scale
    return _as_array(num.tolist()), _as_array(den.tolist())
