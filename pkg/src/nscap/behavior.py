"""Bipartite behaviors P(a,b|x,y) with two inputs and four outcomes per party.

Entries live in a flat vector of length 64 at position ``32*x + 16*y + 4*a + b``.
An outcome ``a`` encodes the channel-input bit pair ``(a >> 1, a & 1)``.
"""
import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import product

import numpy as np

from nscap.errors import DomainError

N_INPUTS = 2
N_OUTCOMES = 4
SIZE = 64

_NORM_TOL = 1e-12


def index_of(x, y, a, b):
    """Flat position of P(a,b|x,y)."""
    for v, hi in ((x, 2), (y, 2), (a, 4), (b, 4)):
        if not (isinstance(v, (int, np.integer)) and 0 <= v < hi):
            raise DomainError(f"index argument out of range: {(x, y, a, b)}")
    return 32 * x + 16 * y + 4 * a + b


def tuple_of(index):
    """Inverse of :func:`index_of`."""
    if not 0 <= index < SIZE:
        raise DomainError(f"flat index out of range: {index}")
    return index >> 5, (index >> 4) & 1, (index >> 2) & 3, index & 3


def outcome_to_bits(a):
    """Map an outcome 0..3 to its channel-input bits ``(x_i1, x_i2)``."""
    if not (isinstance(a, (int, np.integer)) and 0 <= a < 4):
        raise DomainError(f"outcome out of range: {a!r}")
    return int(a) >> 1, int(a) & 1


def bits_to_outcome(hi, lo):
    if hi not in (0, 1) or lo not in (0, 1):
        raise DomainError(f"not a bit pair: {(hi, lo)}")
    return 2 * hi + lo


@dataclass(frozen=True)
class Behavior:
    """Exact behavior: 64 rationals."""

    entries: tuple

    def __post_init__(self):
        entries = tuple(Fraction(e) for e in self.entries)
        if len(entries) != SIZE:
            raise DomainError(f"a behavior has {SIZE} entries, got {len(entries)}")
        if any(e < 0 or e > 1 for e in entries):
            raise DomainError("behavior entries must lie in [0, 1]")
        object.__setattr__(self, "entries", entries)

    @classmethod
    def from_function(cls, f):
        """Build from ``f(x, y, a, b)``."""
        entries = [0] * SIZE
        for x, y, a, b in product(range(2), range(2), range(4), range(4)):
            entries[index_of(x, y, a, b)] = f(x, y, a, b)
        return cls(tuple(entries))

    @classmethod
    def uniform(cls):
        return cls((Fraction(1, 16),) * SIZE)

    @classmethod
    def from_integers(cls, numerators, denominator):
        return cls(tuple(Fraction(int(n), int(denominator)) for n in numerators))

    def __getitem__(self, key):
        return self.entries[index_of(*key)]

    def to_array(self):
        return np.array([float(e) for e in self.entries])

    def to_numeric(self):
        return NumericBehavior(self.to_array())

    def integer_form(self):
        """Return ``(numerators, denominator)`` with the smallest common denominator."""
        den = math.lcm(*(e.denominator for e in self.entries))
        return np.array([e.numerator * (den // e.denominator) for e in self.entries],
                        dtype=np.int64), int(den)

    def mix(self, other, weight):
        """Convex combination ``weight*self + (1-weight)*other``."""
        w = Fraction(weight)
        return Behavior(tuple(w * s + (1 - w) * o for s, o in zip(self.entries, other.entries)))

    def blocks(self):
        """Entries as a nested 2x2x4x4 list indexed ``[x][y][a][b]``."""
        return [[[[self.entries[32 * x + 16 * y + 4 * a + b] for b in range(4)]
                  for a in range(4)] for y in range(2)] for x in range(2)]


class NumericBehavior:
    """Floating-point behavior, used where entries are irrational."""

    __slots__ = ("entries",)

    def __init__(self, entries):
        arr = np.array(entries, dtype=float).reshape(-1)
        if arr.size != SIZE:
            raise DomainError(f"a behavior has {SIZE} entries, got {arr.size}")
        arr.setflags(write=False)
        self.entries = arr

    def to_array(self):
        return self.entries

    def __repr__(self):
        return f"NumericBehavior({self.entries.tolist()!r})"


def as_array(beh):
    """Float view of any behavior flavor (or raw 64-vector)."""
    if isinstance(beh, (Behavior, NumericBehavior)):
        return beh.to_array()
    arr = np.asarray(beh, dtype=float)
    if arr.shape != (SIZE,):
        raise DomainError(f"expected {SIZE} entries, got shape {arr.shape}")
    return arr


def _table(beh):
    """Entries reshaped to [x, y, a, b]; exact for Behavior, float otherwise."""
    if isinstance(beh, Behavior):
        return np.array(beh.entries, dtype=object).reshape(2, 2, 4, 4)
    return as_array(beh).reshape(2, 2, 4, 4)


def is_normalized(beh):
    """True iff each of the four conditional blocks sums to 1 (exactly for Behavior)."""
    t = _table(beh)
    sums = t.sum(axis=(2, 3))
    if isinstance(beh, Behavior):
        return all(s == 1 for s in sums.flat)
    return bool(np.all(np.abs(sums - 1.0) <= _NORM_TOL) and np.all(t >= -_NORM_TOL))


def is_no_signaling(beh, tol=_NORM_TOL):
    """True iff both one-party marginals ignore the other party's input.

    Exact for :class:`Behavior`; ``tol`` applies to numeric flavors.
    """
    if not is_normalized(beh):
        raise DomainError("no-signaling check needs a normalized behavior")
    t = _table(beh)
    alice = t.sum(axis=3)  # [x, y, a]
    bob = t.sum(axis=2)  # [x, y, b]
    if isinstance(beh, Behavior):
        return bool(np.all(alice[:, 0] == alice[:, 1]) and np.all(bob[0] == bob[1]))
    return bool(np.all(np.abs(alice[:, 0] - alice[:, 1]) <= tol)
                and np.all(np.abs(bob[0] - bob[1]) <= tol))


def marginal(beh, party, setting):
    """One-party outcome distribution for ``party`` ('A' or 'B') at input ``setting``."""
    if party not in ("A", "B"):
        raise DomainError(f"party must be 'A' or 'B', got {party!r}")
    if setting not in (0, 1):
        raise DomainError(f"input must be a bit, got {setting!r}")
    if not is_no_signaling(beh):
        raise DomainError("marginals are only defined for no-signaling behaviors")
    t = _table(beh)
    if party == "A":
        dist = t[setting, 0].sum(axis=1)
    else:
        dist = t[0, setting].sum(axis=0)
    return tuple(dist.tolist())


def is_local_deterministic(beh):
    """True iff the behavior is a product of two deterministic response functions."""
    t = _table(beh)
    if isinstance(beh, Behavior):
        ones = np.array([[[[e == 1 for e in r] for r in blk] for blk in row] for row in t])
        zeros_or_ones = all(e in (0, 1) for e in beh.entries)
    else:
        ones = t == 1.0
        zeros_or_ones = bool(np.all((t == 0.0) | (t == 1.0)))
    if not zeros_or_ones:
        return False
    resp_a = [None, None]
    resp_b = [None, None]
    for x, y in product(range(2), range(2)):
        hits = np.argwhere(ones[x, y])
        if len(hits) != 1:
            return False
        a, b = (int(v) for v in hits[0])
        if resp_a[x] not in (None, a) or resp_b[y] not in (None, b):
            return False
        resp_a[x], resp_b[y] = a, b
    return True
