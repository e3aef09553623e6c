"""Independent reference computations used by the tests.

None of these share code paths with the implementations they check beyond
reading vertex sets.
"""
import math
from fractions import Fraction

import numpy as np


def singlet_correlation_by_hand():
    """P(a1 = a2 | m1, m2) from correlators E = -cos(angle between Bloch vectors)."""
    alice = {0: (0.0, 1.0), 1: (1.0, 0.0)}  # (x, z) Bloch components of Z and X
    s = 1 / math.sqrt(2)
    bob = {0: (-s, -s), 1: (s, -s)}
    out = {}
    for m1 in (0, 1):
        for m2 in (0, 1):
            ax, az = alice[m1]
            bx, bz = bob[m2]
            e = -(ax * bx + az * bz)
            out[m1, m2] = (1 + e) / 2
    return out


def edge_crossing_cut(num, den, coeffs, level):
    """Vertices of ``NS & {c . P = level}`` from the NS vertex list alone.

    ``num / den`` are all vertices of the no-signaling polytope.  A vertex of
    the slice is either an NS vertex on the hyperplane or the crossing point
    of an NS edge whose endpoints lie strictly on opposite sides.  Edges are
    found with the combinatorial test on zero sets (the polytope has
    dimension 48, so an edge needs at least 47 common zeros).
    """
    num = np.asarray(num, dtype=np.int64)
    den = np.asarray(den, dtype=np.int64)
    c = np.asarray(coeffs, dtype=np.int64)
    lev = Fraction(level)
    val = num @ c  # value = val / den
    side = np.sign(lev.denominator * val - lev.numerator * den)
    bits = np.uint64(1) << np.arange(64, dtype=np.uint64)
    zeros = np.bitwise_or.reduce(np.where(num == 0, bits, np.uint64(0)), axis=1)
    pop = np.bitwise_count(zeros)
    above = np.nonzero(side > 0)[0]
    below = side < 0
    if len(above) > len(np.nonzero(below)[0]):
        raise ValueError("oracle expects few vertices above the hyperplane")
    points = [tuple(Fraction(int(v), int(d)) for v in row)
              for row, d in zip(num[side == 0], den[side == 0])]
    for u in above:
        common = zeros & zeros[u]
        cpop = np.bitwise_count(common)
        cand = np.nonzero(below & (cpop >= 47))[0]
        for w in cand:
            cw = common[w]
            holders = np.count_nonzero(((zeros & cw) == cw) & (pop >= cpop[w]))
            if holders != 2:  # only u and w contain the common zero set
                continue
            fu = Fraction(int(val[u]), int(den[u]))
            fw = Fraction(int(val[w]), int(den[w]))
            lam = (fu - lev) / (fu - fw)
            points.append(tuple(Fraction(int(a), int(den[u])) * (1 - lam)
                                + Fraction(int(b), int(den[w])) * lam
                                for a, b in zip(num[u], num[w])))
    return set(points)


def exact_rank(rows):
    """Rank over the rationals by fraction-free elimination on Python ints."""
    m = [[Fraction(v) for v in r] for r in rows]
    rank, ncols = 0, len(m[0]) if m else 0
    for col in range(ncols):
        piv = next((i for i in range(rank, len(m)) if m[i][col] != 0), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        for i in range(rank + 1, len(m)):
            if m[i][col]:
                f = m[i][col] / m[rank][col]
                m[i] = [a - f * b for a, b in zip(m[i], m[rank])]
        rank += 1
    return rank
