"""The two-parameter interference channel and sum rates of encodings.

Senders map messages (m1, m2) to channel inputs X1 = (x11, x12) and
X2 = (x21, x22) through a behavior P(a,b|m1,m2), with outcome ``a`` read
as the bit pair of X1.  The channel outputs (Y1, Y2) = (x11, x21) with
probability p when x12 XOR x22 == x11*x21 (q otherwise), and the flipped
pair with the remaining probability.
"""
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from nscap.behavior import Behavior, as_array, outcome_to_bits
from nscap.errors import DomainError

_ROW_TOL = 1e-12


@dataclass(frozen=True)
class ChannelParams:
    p: float
    q: float

    def __post_init__(self):
        for name in ("p", "q"):
            v = getattr(self, name)
            if not 0 <= v <= 1:
                raise DomainError(f"{name}={v} outside [0, 1]")

    @property
    def incompatible(self):
        return self.p != self.q


def _params(params):
    if isinstance(params, ChannelParams):
        return params
    return ChannelParams(*params)


def binary_entropy(t):
    """Binary entropy in bits, with 0*log(0) = 0.  Accepts scalars or arrays."""
    arr = np.asarray(t, dtype=float)
    if np.any((arr < 0) | (arr > 1)):
        raise DomainError("binary entropy needs probabilities in [0, 1]")
    with np.errstate(divide="ignore", invalid="ignore"):
        h = -(np.where(arr > 0, arr * np.log2(arr), 0.0)
              + np.where(arr < 1, (1 - arr) * np.log2(1 - arr), 0.0))
    return float(h) if h.ndim == 0 else h


def _h(t):
    # internal: clip rounding noise before taking entropies
    return binary_entropy(np.clip(t, 0.0, 1.0))


def _condition(a, b):
    x11, x12 = outcome_to_bits(a)
    x21, x22 = outcome_to_bits(b)
    return (x12 ^ x22) == (x11 & x21)


def channel_conditional(params, x11, x12, x21, x22):
    """Distribution of (Y1, Y2) as a 2x2 array indexed ``[y1, y2]``."""
    params = _params(params)
    for v in (x11, x12, x21, x22):
        if v not in (0, 1):
            raise DomainError(f"channel inputs must be bits, got {(x11, x12, x21, x22)}")
    keep = params.p if (x12 ^ x22) == (x11 & x21) else params.q
    out = np.zeros((2, 2))
    out[x11, x21] += keep
    out[1 - x11, 1 - x21] += 1 - keep
    return out


def _cell_tensor(params):
    """P_N(y1, y2 | a, b) for all outcome pairs, shape (4, 4, 2, 2)."""
    t = np.zeros((4, 4, 2, 2))
    for a in range(4):
        for b in range(4):
            t[a, b] = channel_conditional(params, *outcome_to_bits(a), *outcome_to_bits(b))
    return t


def is_incompatible(params):
    """True iff a receiver's marginal depends on the other sender's input."""
    params = _params(params)
    for x11 in (0, 1):
        for x12 in (0, 1):
            y1 = {channel_conditional(params, x11, x12, x21, x22)[1].sum()
                  for x21 in (0, 1) for x22 in (0, 1)}
            if len(y1) > 1:
                return True
    return False


@dataclass(frozen=True)
class ComposedConditional:
    """P(Y1, Y2 | m1, m2) as an array indexed ``[m1, m2, y1, y2]``."""

    table: np.ndarray

    def __post_init__(self):
        sums = self.table.sum(axis=(2, 3))
        if np.any(np.abs(sums - 1) > _ROW_TOL):
            raise DomainError("composed conditional rows must sum to 1")

    def receiver_ones(self):
        """``(P(Y1=1|m1,m2), P(Y2=1|m1,m2))`` as two 2x2 arrays."""
        return self.table[:, :, 1, :].sum(axis=2), self.table[:, :, :, 1].sum(axis=2)


def compose(encoding, params):
    """Channel after encoding, summing over all outcome pairs."""
    enc = as_array(encoding).reshape(2, 2, 4, 4)
    table = np.einsum("xyab,abij->xyij", enc, _cell_tensor(_params(params)))
    return ComposedConditional(table)


def _mutual_information(ones):
    """I(M; Y) for uniform binary M given P(Y=1|M=m) for m = 0, 1."""
    ones = np.asarray(ones)
    return _h(ones.mean(axis=0)) - 0.5 * (_h(ones[0]) + _h(ones[1]))


def rate_from_ones(y1_ones, y2_ones):
    """Sum rate from P(Y1=1|m1,m2) and P(Y2=1|m1,m2), uniform message prior.

    Broadcasts over trailing dimensions.
    """
    y1_ones, y2_ones = np.asarray(y1_ones), np.asarray(y2_ones)
    u1 = 0.5 * (y1_ones[:, 0] + y1_ones[:, 1])  # P(Y1=1|m1)
    u2 = 0.5 * (y2_ones[0] + y2_ones[1])  # P(Y2=1|m2)
    return _mutual_information(u1) + _mutual_information(u2)


def sum_rate(encoding, params):
    """I(A1; Y1) + I(A2; Y2) in bits under uniform messages and identity decoding."""
    y1, y2 = compose(encoding, params).receiver_ones()
    return float(rate_from_ones(y1, y2))


# ------------------------------------------------------------ signatures

# Affine coefficients (const, p, q) of P(Y_i = 1) for each outcome cell.
def _cell_affine(receiver):
    out = np.zeros((4, 4, 3), dtype=np.int64)
    for a in range(4):
        for b in range(4):
            first = outcome_to_bits(a if receiver == 1 else b)[0]
            cond = _condition(a, b)
            if first == 1:
                out[a, b] = (0, 1, 0) if cond else (0, 0, 1)
            else:
                out[a, b] = (1, -1, 0) if cond else (1, 0, -1)
    return out


CELL_AFFINE = (_cell_affine(1), _cell_affine(2))


@dataclass(frozen=True)
class MarginalSignature:
    """Affine (const, p, q) coefficients of P(Y_i=1 | m1, m2).

    ``receiver1[m1][m2]`` and ``receiver2[m1][m2]`` are triples of Fractions.
    """

    receiver1: tuple
    receiver2: tuple

    def ones_at(self, p, q):
        def ev(coef):
            return np.array([[float(c + pc * Fraction(p) + qc * Fraction(q))
                              for c, pc, qc in row] for row in coef])
        return ev(self.receiver1), ev(self.receiver2)

    def sum_rate(self, p, q):
        return float(rate_from_ones(*self.ones_at(p, q)))

    def rate_key(self):
        """Coefficients of the per-message averages P(Y1=1|m1), P(Y2=1|m2).

        Equal keys imply equal sum-rate functions of (p, q).
        """
        r1 = tuple(tuple((self.receiver1[m][0][k] + self.receiver1[m][1][k]) / 2
                         for k in range(3)) for m in range(2))
        r2 = tuple(tuple((self.receiver2[0][m][k] + self.receiver2[1][m][k]) / 2
                         for k in range(3)) for m in range(2))
        return r1, r2


def marginal_signature(encoding):
    if not isinstance(encoding, Behavior):
        raise DomainError("marginal signatures need an exact behavior")
    enc = np.array(encoding.entries, dtype=object).reshape(2, 2, 4, 4)
    out = []
    for cells in CELL_AFFINE:
        coef = np.einsum("xyab,abk->xyk", enc, cells.astype(object))
        out.append(tuple(tuple(tuple(Fraction(v) for v in coef[m1, m2])
                               for m2 in range(2)) for m1 in range(2)))
    return MarginalSignature(*out)


# Integer matrix mapping a behavior row to the 12 rate-key coefficients,
# scaled by 2 (the average over the other message).
def _rate_key_matrix():
    mat = np.zeros((64, 12), dtype=np.int64)
    for m1 in range(2):
        for m2 in range(2):
            for a in range(4):
                for b in range(4):
                    row = 32 * m1 + 16 * m2 + 4 * a + b
                    mat[row, 3 * m1:3 * m1 + 3] += CELL_AFFINE[0][a, b]
                    mat[row, 6 + 3 * m2:6 + 3 * m2 + 3] += CELL_AFFINE[1][a, b]
    return mat


RATE_KEY_MATRIX = _rate_key_matrix()


def rates_from_keys(keys, scale, p, q):
    """Sum rates for integer rate keys (units of ``1/scale``) at scalar or array (p, q).

    Output shape is ``(len(keys),) + broadcast(p, q).shape``.
    """
    p, q = np.broadcast_arrays(np.asarray(p, dtype=float), np.asarray(q, dtype=float))
    k = np.asarray(keys, dtype=float).reshape(-1, 4, 3) / scale
    extra = (None,) * p.ndim
    u = (k[:, :, 0][(...,) + extra] + k[:, :, 1][(...,) + extra] * p
         + k[:, :, 2][(...,) + extra] * q)  # (n, 4, *grid)
    i1 = _h(0.5 * (u[:, 0] + u[:, 1])) - 0.5 * (_h(u[:, 0]) + _h(u[:, 1]))
    i2 = _h(0.5 * (u[:, 2] + u[:, 3])) - 0.5 * (_h(u[:, 2]) + _h(u[:, 3]))
    return i1 + i2


def sum_rates(values, params):
    """Sum rates of many float behaviors (rows of ``values``) at one parameter point."""
    params = _params(params)
    keys = np.asarray(values, dtype=float) @ RATE_KEY_MATRIX
    return rates_from_keys(keys, 2.0, params.p, params.q)
