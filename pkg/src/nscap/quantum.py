"""Quantum encodings: singlet strategies and the level-1 NPA relaxation.

The lower bound uses the two-outcome Tsirelson correlation and lets each
sender choose its channel input as a deterministic function of its message
and its measurement outcome.  The upper side solves the 13x13 level-1
moment-matrix relaxation with the barrier solver in :mod:`nscap.sdp`.
"""
from dataclasses import dataclass
from fractions import Fraction
from itertools import product

import numpy as np

from nscap.behavior import (SIZE, Behavior, NumericBehavior, bits_to_outcome,
                            is_local_deterministic, outcome_to_bits)
from nscap.channel import CELL_AFFINE, ChannelParams, _h
from nscap.errors import DomainError
from nscap.sdp import maximize_lmi

_TOL = 1e-12


# ------------------------------------------------------------ correlations

@dataclass(frozen=True)
class TwoOutcomeCorrelation:
    """P(a1, a2 | m1, m2) as an array indexed ``[m1, m2, a1, a2]``."""

    table: np.ndarray

    def __post_init__(self):
        t = np.array(self.table, dtype=float)
        if t.shape != (2, 2, 2, 2):
            raise DomainError("two-outcome correlation needs shape (2, 2, 2, 2)")
        if np.any(t < -_TOL) or np.any(np.abs(t.sum(axis=(2, 3)) - 1) > _TOL):
            raise DomainError("correlation rows must be distributions")
        alice = t.sum(axis=3)
        bob = t.sum(axis=2)
        if (np.abs(alice[:, 0] - alice[:, 1]).max() > _TOL
                or np.abs(bob[0] - bob[1]).max() > _TOL):
            raise DomainError("correlation is signaling")
        t.setflags(write=False)
        object.__setattr__(self, "table", t)

    def correlator(self, m1, m2):
        t = self.table[m1, m2]
        return t[0, 0] + t[1, 1] - t[0, 1] - t[1, 0]

    def chsh_value(self):
        return (self.correlator(0, 0) + self.correlator(0, 1)
                + self.correlator(1, 0) - self.correlator(1, 1))


_X = np.array([[0.0, 1.0], [1.0, 0.0]])
_Z = np.array([[1.0, 0.0], [0.0, -1.0]])


def _projectors(obs):
    eye = np.eye(2)
    return (eye + obs) / 2, (eye - obs) / 2


def tsirelson_correlation():
    """Singlet shared, A measures Z or X, B measures -(X+Z)/sqrt2 or (X-Z)/sqrt2."""
    psi = np.array([0.0, 1.0, -1.0, 0.0]) / np.sqrt(2)
    alice = (_Z, _X)
    bob = (-(_X + _Z) / np.sqrt(2), (_X - _Z) / np.sqrt(2))
    t = np.empty((2, 2, 2, 2))
    for m1, m2 in product(range(2), repeat=2):
        for a1, pa in enumerate(_projectors(alice[m1])):
            for a2, pb in enumerate(_projectors(bob[m2])):
                t[m1, m2, a1, a2] = psi @ np.kron(pa, pb) @ psi
    return TwoOutcomeCorrelation(t)


# --------------------------------------------------------- post-processing

def _check_map(df):
    df = tuple(tuple(int(v) for v in bits) for bits in df)
    if len(df) != 4 or any(len(b) != 2 or min(b) < 0 or max(b) > 1 for b in df):
        raise DomainError("a post-processing maps the 4 (message, outcome) pairs to bit pairs")
    return df


@dataclass(frozen=True)
class PostProcessing:
    """Channel-input bit pairs ``df[2*m + a]`` for message m and outcome a."""

    df1: tuple
    df2: tuple

    def __post_init__(self):
        object.__setattr__(self, "df1", _check_map(self.df1))
        object.__setattr__(self, "df2", _check_map(self.df2))

    @classmethod
    def from_codes(cls, i, j):
        """The ``i``-th and ``j``-th of the 256 maps per party."""
        return cls(tuple(outcome_to_bits(o) for o in ALL_MAPS[i]),
                   tuple(outcome_to_bits(o) for o in ALL_MAPS[j]))

    def outcome_maps(self):
        return (np.array([bits_to_outcome(*b) for b in self.df1]),
                np.array([bits_to_outcome(*b) for b in self.df2]))


# row k lists the 4-valued outcome for domain points (m, a) = 00, 01, 10, 11
ALL_MAPS = np.array(list(product(range(4), repeat=4)), dtype=np.int64)


def lift_with_postprocessing(corr, pp):
    """The 4-outcome behavior produced by applying ``pp`` to ``corr``."""
    f1, f2 = pp.outcome_maps()
    out = np.zeros((2, 2, 4, 4))
    for m1, m2, a1, a2 in product(range(2), repeat=4):
        out[m1, m2, f1[2 * m1 + a1], f2[2 * m2 + a2]] += corr.table[m1, m2, a1, a2]
    return NumericBehavior(out.reshape(SIZE))


def _cell_ones(params):
    """P(Y_i = 1 | a, b) for both receivers, two (4, 4) arrays."""
    v = np.array([1.0, params.p, params.q])
    return CELL_AFFINE[0] @ v, CELL_AFFINE[1] @ v


def _search_rates(corr, params):
    """Sum rate of every post-processing pair, shape (256, 256)."""
    f1, f2 = _cell_ones(params)
    # ALL_MAPS[:, 2m + a] reshaped to [map, m, a]
    maps = ALL_MAPS.reshape(256, 2, 2)
    A = maps[:, None, :, None, :, None]
    B = maps[None, :, None, :, None, :]
    t = corr.table[None, None]  # [.., m1, m2, a1, a2]
    y1 = (f1[A, B] * t).sum(axis=(4, 5))  # [i, j, m1, m2]
    y2 = (f2[A, B] * t).sum(axis=(4, 5))
    u1 = y1.mean(axis=3)  # P(Y1=1|m1)
    u2 = y2.mean(axis=2)  # P(Y2=1|m2)
    r1 = _h(u1.mean(axis=2)) - _h(u1).mean(axis=2)
    r2 = _h(u2.mean(axis=2)) - _h(u2).mean(axis=2)
    return r1 + r2


def best_postprocessing(params, corr=None):
    """``(rate, PostProcessing)`` maximizing the sum rate; first pair wins ties."""
    params = params if isinstance(params, ChannelParams) else ChannelParams(*params)
    rates = _search_rates(corr or tsirelson_correlation(), params)
    k = int(np.argmax(rates))
    return float(rates.flat[k]), PostProcessing.from_codes(*divmod(k, 256))


def quantum_lb_search(params, corr=None):
    """Largest sum rate over all 65,536 post-processing pairs of the correlation."""
    return best_postprocessing(params, corr)[0]


# --------------------------------------------------------------- NPA level 1
#
# Operator order: identity, A projectors (x, a) at 1 + 3x + a, B projectors
# (y, b) at 7 + 3y + b, for a, b < 3.  Free variables:
#   pa[x, a]        6   -> diagonal and identity row of the A block
#   pb[y, b]        6
#   pab[x, y, a, b] 36  -> A x B block, equal to P(a, b | x, y)
#   ga[a, a']       9   -> <A_{0a} A_{1a'}>
#   gb[b, b']       9

NPA_SIZE = 13
N_VARS = 66


def _a(x, a):
    return 1 + 3 * x + a


def _b(y, b):
    return 7 + 3 * y + b


def _var_layout():
    idx = iter(range(N_VARS))
    pa = {(x, a): next(idx) for x in range(2) for a in range(3)}
    pb = {(y, b): next(idx) for y in range(2) for b in range(3)}
    pab = {k: next(idx) for k in product(range(2), range(2), range(3), range(3))}
    ga = {k: next(idx) for k in product(range(3), repeat=2)}
    gb = {k: next(idx) for k in product(range(3), repeat=2)}
    return pa, pb, pab, ga, gb


_PA, _PB, _PAB, _GA, _GB = _var_layout()


def _moment_basis():
    """Constant term F0 and one symmetric matrix per variable."""
    F0 = np.zeros((NPA_SIZE, NPA_SIZE))
    F0[0, 0] = 1
    Fs = np.zeros((N_VARS, NPA_SIZE, NPA_SIZE))

    def put(k, i, j):
        Fs[k, i, j] = Fs[k, j, i] = 1

    for (x, a), k in _PA.items():
        put(k, 0, _a(x, a))
        put(k, _a(x, a), _a(x, a))
    for (y, b), k in _PB.items():
        put(k, 0, _b(y, b))
        put(k, _b(y, b), _b(y, b))
    for (x, y, a, b), k in _PAB.items():
        put(k, _a(x, a), _b(y, b))
    for (a, a2), k in _GA.items():
        put(k, _a(0, a), _a(1, a2))
    for (b, b2), k in _GB.items():
        put(k, _b(0, b), _b(1, b2))
    return F0, Fs


def _behavior_map():
    """``P = P0 + T @ vars`` for the full 64-entry behavior."""
    P0 = np.zeros(SIZE)
    T = np.zeros((SIZE, N_VARS))
    for x, y, a, b in product(range(2), range(2), range(4), range(4)):
        row = 32 * x + 16 * y + 4 * a + b
        if a < 3 and b < 3:
            T[row, _PAB[x, y, a, b]] = 1
        elif a < 3:
            T[row, _PA[x, a]] = 1
            for bb in range(3):
                T[row, _PAB[x, y, a, bb]] = -1
        elif b < 3:
            T[row, _PB[y, b]] = 1
            for aa in range(3):
                T[row, _PAB[x, y, aa, b]] = -1
        else:
            P0[row] = 1
            for aa in range(3):
                T[row, _PA[x, aa]] = -1
            for bb in range(3):
                T[row, _PB[y, bb]] = -1
            for aa, bb in product(range(3), repeat=2):
                T[row, _PAB[x, y, aa, bb]] = 1
    return P0, T


F0, FS = _moment_basis()
P0, TMAP = _behavior_map()


def _uniform_start():
    """Moments of independent uniform outcomes; strictly feasible."""
    y = np.zeros(N_VARS)
    for k in _PA.values():
        y[k] = 0.25
    for k in _PB.values():
        y[k] = 0.25
    for k in _PAB.values():
        y[k] = 1 / 16
    for k in _GA.values():
        y[k] = 1 / 16
    for k in _GB.values():
        y[k] = 1 / 16
    return y


def moment_matrix(variables):
    return F0 + np.tensordot(np.asarray(variables, dtype=float), FS, axes=1)


@dataclass(frozen=True)
class NPAResult:
    value: float
    behavior: NumericBehavior
    moment_matrix: np.ndarray
    gap: float
    newton_steps: int


def _npa_optimize(functional, sign, tol):
    c = np.array([float(Fraction(v)) for v in functional])
    if c.shape != (SIZE,):
        raise DomainError("functional needs 64 coefficients")
    res = maximize_lmi(sign * (c @ TMAP), sign * (c @ P0), F0, FS, TMAP, P0,
                       _uniform_start(), tol=tol)
    beh = np.clip(P0 + TMAP @ res.y, 0.0, 1.0)
    return NPAResult(sign * res.value, NumericBehavior(beh), moment_matrix(res.y),
                     res.gap, res.newton_steps)


def npa1_max_functional(functional, tol=1e-8, detail=False):
    """Maximum of ``functional . P`` over level-1 behaviors with P >= 0."""
    res = _npa_optimize(functional, 1.0, tol)
    return res if detail else res.value


def npa1_min_functional(functional, tol=1e-8, detail=False):
    res = _npa_optimize(functional, -1.0, tol)
    return res if detail else res.value


def deterministic_moment_matrix(beh):
    """Exact rank-one moment matrix of a local deterministic behavior."""
    if not isinstance(beh, Behavior) or not is_local_deterministic(beh):
        raise DomainError("needs an exact local deterministic behavior")
    a_out = [next(a for a in range(4) if beh[x, 0, a, 0] + beh[x, 0, a, 1]
                  + beh[x, 0, a, 2] + beh[x, 0, a, 3] == 1) for x in range(2)]
    b_out = [next(b for b in range(4) if sum(beh[0, y, a, b] for a in range(4)) == 1)
             for y in range(2)]
    v = [Fraction(1)]
    v += [Fraction(int(a_out[x] == a)) for x in range(2) for a in range(3)]
    v += [Fraction(int(b_out[y] == b)) for y in range(2) for b in range(3)]
    return [[vi * vj for vj in v] for vi in v]


def moment_matrix_violations(M, beh):
    """Structural constraints a level-1 moment matrix of ``beh`` must meet.

    Returns a list of human-readable violations (empty when exact).
    """
    bad = []
    if M[0][0] != 1:
        bad.append("identity entry is not 1")
    for i in range(NPA_SIZE):
        for j in range(NPA_SIZE):
            if M[i][j] != M[j][i]:
                bad.append(f"not symmetric at {(i, j)}")
    for x in range(2):
        for a in range(3):
            if M[_a(x, a)][_a(x, a)] != M[0][_a(x, a)]:
                bad.append(f"A projector {(x, a)} not idempotent")
            for a2 in range(3):
                if a2 != a and M[_a(x, a)][_a(x, a2)] != 0:
                    bad.append(f"A outcomes {a},{a2} of input {x} not orthogonal")
    for y in range(2):
        for b in range(3):
            if M[_b(y, b)][_b(y, b)] != M[0][_b(y, b)]:
                bad.append(f"B projector {(y, b)} not idempotent")
            for b2 in range(3):
                if b2 != b and M[_b(y, b)][_b(y, b2)] != 0:
                    bad.append(f"B outcomes {b},{b2} of input {y} not orthogonal")
    for x, y, a, b in product(range(2), range(2), range(3), range(3)):
        if M[_a(x, a)][_b(y, b)] != beh[x, y, a, b]:
            bad.append(f"A x B entry {(x, y, a, b)} differs from the behavior")
    return bad
