"""The no-signaling polytope, its cropping functionals and the outer polytope P_out.

P_out is the no-signaling polytope intersected with the four half-spaces
``L_(i,j) <= c`` (``c = 7/2`` by default).  Its vertices are the old vertices
that satisfy all four cuts plus the vertices of each slice ``NS & {L_(i,j) = c}``.
Any ``2 + sqrt2 < c < 4`` keeps the quantum set inside; the level is a parameter.
"""
import time
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product

import numpy as np

from nscap.behavior import SIZE, index_of
from nscap.capacity import rate_table
from nscap.channel import ChannelParams, sum_rates
from nscap.data import MAX_RATE_SUPPORTS, PAIRS, max_rate_vertex
from nscap.dd import DDStats, HPolytope, enumerate_vertices
from nscap.errors import DomainError, StateError
from nscap.relabel import ORBIT_KINDS, cache_path, orbit
from nscap.vertexset import VertexSet, load_vertex_set, save_vertex_set

CUT_LEVEL = Fraction(7, 2)
CUT_SIZE = 3070
ALT_CUT_LEVEL = Fraction(18, 5)
MAX_RATE_TOL = 1e-9


# --------------------------------------------------------- H-representation

def ns_h_representation():
    """Normalization and no-signaling equalities, positivity inequalities."""
    eq = []
    for x, y in product(range(2), repeat=2):
        row = [0] * SIZE
        for a, b in product(range(4), repeat=2):
            row[index_of(x, y, a, b)] = 1
        eq.append((tuple(row), 1))
    for x, a in product(range(2), range(4)):
        row = [0] * SIZE
        for b in range(4):
            row[index_of(x, 0, a, b)] += 1
            row[index_of(x, 1, a, b)] -= 1
        eq.append((tuple(row), 0))
    for y, b in product(range(2), range(4)):
        row = [0] * SIZE
        for a in range(4):
            row[index_of(0, y, a, b)] += 1
            row[index_of(1, y, a, b)] -= 1
        eq.append((tuple(row), 0))
    ineq = tuple((tuple(-int(i == k) for i in range(SIZE)), 0) for k in range(SIZE))
    return HPolytope(tuple(eq), ineq)


def vertex_enumeration(hp, kind="vertices", stats=None):
    """Exact vertices of ``hp`` as a canonical :class:`VertexSet`."""
    if hp.dim != SIZE:
        raise DomainError(f"vertex sets hold {SIZE}-entry behaviors, got dimension {hp.dim}")
    num, den = enumerate_vertices(hp, stats)
    return VertexSet(kind, num, den)


# --------------------------------------------------------------- functionals

def _check_pair(pair):
    pair = tuple(pair)
    if pair not in PAIRS:
        raise DomainError(f"{pair} is not one of the max-rate pairs {PAIRS}")
    return pair


def special_functional(i, j):
    """Coefficients of ``L_(i,j) = 2 (v_i + v_j) . P`` (0/1 integers as Fractions)."""
    i, j = _check_pair((i, j))
    coeffs = [Fraction(0)] * SIZE
    for k in MAX_RATE_SUPPORTS[i] + MAX_RATE_SUPPORTS[j]:
        coeffs[k] += 1
    return tuple(coeffs)


def functional_matrix():
    """The four cropping functionals as rows of an int64 array."""
    return np.array([[int(c) for c in special_functional(*p)] for p in PAIRS], dtype=np.int64)


def functional_values(vs):
    """Exact values of the four functionals on every vertex: ``(num, den)`` arrays."""
    return vs.num @ functional_matrix().T, vs.den


def _level(level):
    level = Fraction(level)
    if not 2 < level < 4:
        raise DomainError(f"cut level must lie strictly between 2 and 4, got {level}")
    return level


def within_cuts_mask(vs, pairs=PAIRS, level=CUT_LEVEL):
    """Vertices with ``L_(i,j) <= level`` for every listed pair, exact."""
    level = _level(level)
    num, den = functional_values(vs)
    cols = [PAIRS.index(tuple(p)) for p in pairs]
    return np.all(level.denominator * num[:, cols] <= level.numerator * den[:, None], axis=1)


# ----------------------------------------------------------- max-rate search

def find_max_rate_vertices(params, vs, tol=MAX_RATE_TOL):
    """Vertices of ``vs`` whose sum rate is within ``tol`` of the set maximum."""
    params = params if isinstance(params, ChannelParams) else ChannelParams(*params)
    table = rate_table(vs)
    rates = table.rates(params.p, params.q)
    good = np.nonzero(rates >= rates.max() - tol)[0]
    rows = np.isin(table.inverse, good)
    return VertexSet(f"{vs.kind}-maxrate", vs.num[rows], vs.den[rows])


@dataclass(frozen=True)
class PairReport:
    pair_rates: dict
    cross_pair_rates: dict
    max_triple_rate: float
    max_larger_mixture_rate: float
    ok: bool


def pair_structure_check(params=(1, 0), tol=1e-9, gap=1e-6):
    """Midpoints of the pairs reach 2; every other mixture stays strictly below."""
    V = np.array([[float(v) for v in max_rate_vertex(k).entries] for k in range(1, 9)])
    target = 2.0

    def rate(ks):
        return float(sum_rates(V[[k - 1 for k in ks]].mean(axis=0)[None], params)[0])

    pair_rates = {p: rate(p) for p in PAIRS}
    cross = {p: rate(p) for p in combinations(range(1, 9), 2) if p not in PAIRS}
    triples = max(rate(t) for t in combinations(range(1, 9), 3))
    larger = max(rate(s) for n in range(4, 9) for s in combinations(range(1, 9), n))
    ok = (all(abs(r - target) <= tol for r in pair_rates.values())
          and max(cross.values()) < target - gap and triples < target - gap
          and larger < target - gap)
    return PairReport(pair_rates, cross, triples, larger, ok)


# ------------------------------------------------------------------- cuts

@dataclass(frozen=True)
class CutResult:
    pair: tuple
    new_vertices: VertexSet
    seconds: float = 0.0
    others_ok: np.ndarray = field(default=None, repr=False)
    level: Fraction = CUT_LEVEL

    @property
    def all_within_other_cuts(self):
        return bool(np.all(self.others_ok))


def cut_polytope(i, j, level=CUT_LEVEL):
    coeffs = special_functional(i, j)
    return ns_h_representation().with_equality(coeffs, _level(level))


def _level_tag(level):
    level = _level(level)
    return "" if level == CUT_LEVEL else f"-at-{level.numerator}_{level.denominator}"


def cut_kind(i, j, level=CUT_LEVEL):
    return f"cut-{i}{j}{_level_tag(level)}"


def _audit_others(vs, pair, level):
    others = [p for p in PAIRS if p != tuple(pair)]
    return within_cuts_mask(vs, others, level)


def cut_new_vertices(i, j, stats=None, level=CUT_LEVEL):
    """Vertices of the slice ``NS & {L_(i,j) = level}`` by exact enumeration."""
    i, j = _check_pair((i, j))
    level = _level(level)
    start = time.perf_counter()
    vs = vertex_enumeration(cut_polytope(i, j, level), cut_kind(i, j, level), stats)
    return CutResult((i, j), vs, time.perf_counter() - start,
                     _audit_others(vs, (i, j), level), level)


def cut(i, j, cache_dir=None, rebuild=False, level=CUT_LEVEL):
    """Build-or-load one cut; returns ``(CutResult, was_cached)``."""
    i, j = _check_pair((i, j))
    level = _level(level)
    path = cache_path(cut_kind(i, j, level), cache_dir)
    if path.exists() and not rebuild:
        vs = load_vertex_set(path)
        return CutResult((i, j), vs, 0.0, _audit_others(vs, (i, j), level), level), True
    res = cut_new_vertices(i, j, level=level)
    path.parent.mkdir(parents=True, exist_ok=True)
    save_vertex_set(res.new_vertices, path)
    return res, False


def cached_cut(i, j, cache_dir=None, level=CUT_LEVEL):
    path = cache_path(cut_kind(*_check_pair((i, j)), level), cache_dir)
    if not path.exists():
        raise StateError(f"cut {(i, j)} not cached at {path}; run `nscap pout` first")
    vs = load_vertex_set(path)
    return CutResult((i, j), vs, 0.0, _audit_others(vs, (i, j), level), _level(level))


# ------------------------------------------------------------------ P_out

@dataclass(frozen=True)
class POutAudit:
    size_before_dedup: int
    size: int
    removed_max_rate: int
    cut_vertices_violating_other_cuts: dict
    dropped_violators: int


def build_p_out(orbits, cuts, level=CUT_LEVEL):
    """Assemble P_out from the four orbits and the four cut results.

    ``orbits`` maps orbit kind -> VertexSet, ``cuts`` maps pair -> CutResult.
    Every member of the result satisfies all four cuts exactly; cut vertices
    that violate another pair's cut are reported and left out (they are not
    points of P_out).  Returns ``(VertexSet, POutAudit)``.
    """
    missing = [k for k in ORBIT_KINDS if k not in orbits]
    if missing:
        raise StateError(f"missing orbit(s) {missing}; run `nscap vertices all` first")
    missing = [p for p in PAIRS if p not in cuts]
    if missing:
        raise StateError(f"missing cut(s) {missing}; run `nscap pout` to build them")
    half = orbits["half"]
    vmax = VertexSet.from_behaviors("vmax", [max_rate_vertex(k) for k in range(1, 9)])
    vkeys = {(tuple(n), d) for n, d in zip(vmax.num.tolist(), vmax.den.tolist())}
    keep_half = np.array([(tuple(n), d) not in vkeys
                          for n, d in zip(half.num.tolist(), half.den.tolist())], dtype=bool)
    parts_num = [half.num[keep_half]]
    parts_den = [half.den[keep_half]]
    violators = {}
    for p in PAIRS:
        res = cuts[p]
        violators[p] = int(np.count_nonzero(~res.others_ok))
        parts_num.append(res.new_vertices.num)
        parts_den.append(res.new_vertices.den)
    for kind in ("third", "quarter", "local"):
        parts_num.append(orbits[kind].num)
        parts_den.append(orbits[kind].den)
    before = sum(len(d) for d in parts_den)
    kind = "pout" + _level_tag(level)
    if any(cuts[p].level != _level(level) for p in PAIRS):
        raise DomainError(f"cut results were built at a different level than {level}")
    union = VertexSet(kind, np.concatenate(parts_num), np.concatenate(parts_den))
    ok = within_cuts_mask(union, level=level)
    out = VertexSet(kind, union.num[ok], union.den[ok])
    audit = POutAudit(before, len(out), int(np.count_nonzero(~keep_half)), violators,
                      int(np.count_nonzero(~ok)))
    return out, audit


def p_out(cache_dir=None, rebuild=False, level=CUT_LEVEL):
    """Build-or-load P_out, building the orbits and cuts as needed.

    Returns ``(VertexSet, POutAudit or None, cut results)``; the audit is
    only available when P_out was assembled in this call.
    """
    path = cache_path("pout" + _level_tag(level), cache_dir)
    cuts = {p: cut(*p, cache_dir=cache_dir, rebuild=rebuild, level=level)[0] for p in PAIRS}
    if path.exists() and not rebuild:
        return load_vertex_set(path), None, cuts
    orbits = {k: orbit(k, cache_dir, rebuild)[0] for k in ORBIT_KINDS}
    vs, audit = build_p_out(orbits, cuts, level)
    path.parent.mkdir(parents=True, exist_ok=True)
    save_vertex_set(vs, path)
    return vs, audit, cuts


__all__ = ["ALT_CUT_LEVEL", "CUT_LEVEL", "CUT_SIZE", "CutResult", "DDStats", "PairReport", "POutAudit",
           "build_p_out", "cached_cut", "cut", "cut_new_vertices", "cut_polytope",
           "find_max_rate_vertices", "functional_matrix", "functional_values",
           "ns_h_representation", "p_out", "pair_structure_check", "special_functional",
           "vertex_enumeration", "within_cuts_mask"]
