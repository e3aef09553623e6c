"""Published behaviors used as fixed reference points.

Vectors are stored as the flat positions of their nonzero entries (all
nonzero entries of each vector share one value) in the
``32*x + 16*y + 4*a + b`` ordering.
"""
from fractions import Fraction

from nscap.behavior import Behavior

# The eight no-signaling vertices reaching sum rate 2 on the (p, q) = (1, 0)
# channel, numbered in their published order.
MAX_RATE_SUPPORTS = {
    1: (1, 4, 19, 22, 41, 44, 58, 63),
    2: (3, 6, 17, 20, 42, 47, 57, 60),
    3: (9, 12, 26, 31, 33, 36, 51, 54),
    4: (10, 15, 25, 28, 35, 38, 49, 52),
    5: (0, 5, 18, 23, 40, 45, 59, 62),
    6: (2, 7, 16, 21, 43, 46, 56, 61),
    7: (8, 13, 27, 30, 32, 37, 50, 55),
    8: (11, 14, 24, 29, 34, 39, 48, 53),
}

# Pairs whose segment keeps sum rate 2 at (1, 0).  Each pair defines one
# cropping functional 2 (v_i + v_j) . P.
PAIRS = ((1, 8), (2, 7), (3, 6), (4, 5))

# Comparison vertices for the nonlocality-versus-rate table, keyed by the
# common value of their nonzero entries.
COMPARISON_SUPPORTS = {
    2: (0, 5, 18, 23, 40, 45, 59, 62),
    3: (0, 5, 15, 18, 23, 28, 35, 40, 45, 50, 59, 60),
    4: (0, 5, 10, 15, 18, 23, 25, 28, 35, 38, 40, 45, 49, 54, 59, 60),
}


def _from_support(support, value):
    entries = [Fraction(0)] * 64
    for i in support:
        entries[i] = value
    return Behavior(tuple(entries))


def max_rate_vertex(k):
    """Return the published vertex ``v_k`` (k = 1..8)."""
    return _from_support(MAX_RATE_SUPPORTS[k], Fraction(1, 2))


def max_rate_vertices():
    return [max_rate_vertex(k) for k in range(1, 9)]


def comparison_vertex(k):
    """Return the comparison vertex with support probability ``1/k`` (k = 2, 3, 4)."""
    return _from_support(COMPARISON_SUPPORTS[k], Fraction(1, k))
