"""Local reversible relabelings and the vertex orbits they generate.

A relabeling permutes each party's input and, separately for each original
input value, that party's outputs.  There are (2! * 4! * 4!)**2 = 1,327,104
of them; orbits are enumerated by sweeping the whole group.
"""
import os
from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations
from pathlib import Path

import numpy as np

from nscap import kernels
from nscap.behavior import SIZE, Behavior, index_of, tuple_of
from nscap.errors import DomainError, StateError
from nscap.vertexset import VertexSet, load_vertex_set, save_vertex_set

INPUT_PERMS = ((0, 1), (1, 0))
OUTPUT_PERMS = tuple(permutations(range(4)))
PARTY_GROUP_ORDER = 2 * 24 * 24
GROUP_ORDER = PARTY_GROUP_ORDER**2

ORBIT_KINDS = ("local", "half", "third", "quarter")
UNION_KIND = "ns-union"
EXPECTED_SIZES = {"local": 256, "half": 10368, "third": 110592, "quarter": 82944,
                  UNION_KIND: 204160}


def _check_perm(perm, n):
    if sorted(perm) != list(range(n)):
        raise DomainError(f"not a permutation of range({n}): {perm!r}")
    return tuple(perm)


@dataclass(frozen=True)
class Relabeling:
    a_input_perm: tuple = (0, 1)
    a_output_perms: tuple = ((0, 1, 2, 3), (0, 1, 2, 3))
    b_input_perm: tuple = (0, 1)
    b_output_perms: tuple = ((0, 1, 2, 3), (0, 1, 2, 3))

    def __post_init__(self):
        object.__setattr__(self, "a_input_perm", _check_perm(self.a_input_perm, 2))
        object.__setattr__(self, "b_input_perm", _check_perm(self.b_input_perm, 2))
        for name in ("a_output_perms", "b_output_perms"):
            perms = getattr(self, name)
            if len(perms) != 2:
                raise DomainError(f"{name} needs one permutation per input value")
            object.__setattr__(self, name, tuple(_check_perm(p, 4) for p in perms))

    @classmethod
    def from_index(cls, index):
        """The ``index``-th relabeling, 0 <= index < GROUP_ORDER."""
        if not 0 <= index < GROUP_ORDER:
            raise DomainError(f"relabeling index out of range: {index}")
        ia, ib = divmod(index, PARTY_GROUP_ORDER)
        pa, sa = _party_from_index(ia)
        pb, sb = _party_from_index(ib)
        return cls(pa, sa, pb, sb)

    def inverse(self):
        def inv(perm):
            out = [0] * len(perm)
            for i, p in enumerate(perm):
                out[p] = i
            return tuple(out)

        pa, pb = self.a_input_perm, self.b_input_perm
        # new input x' = pa[x] carries outputs relabeled by perms[x]
        a_out = tuple(inv(self.a_output_perms[inv(pa)[xn]]) for xn in range(2))
        b_out = tuple(inv(self.b_output_perms[inv(pb)[yn]]) for yn in range(2))
        return Relabeling(inv(pa), a_out, inv(pb), b_out)

    def index_map(self):
        """``m[i]`` is the flat position that entry ``i`` moves to."""
        out = np.empty(SIZE, dtype=np.int64)
        for i in range(SIZE):
            x, y, a, b = tuple_of(i)
            out[i] = index_of(self.a_input_perm[x], self.b_input_perm[y],
                              self.a_output_perms[x][a], self.b_output_perms[y][b])
        return out


def _party_from_index(i):
    ip, rest = divmod(i, 24 * 24)
    k0, k1 = divmod(rest, 24)
    return INPUT_PERMS[ip], (OUTPUT_PERMS[k0], OUTPUT_PERMS[k1])


def _party_targets(weight_in, weight_out):
    """Position contributions for every party relabeling, shape (1152, 8)."""
    out = np.empty((PARTY_GROUP_ORDER, 8), dtype=np.int64)
    for i in range(PARTY_GROUP_ORDER):
        perm, outs = _party_from_index(i)
        for s in range(2):
            for o in range(4):
                out[i, 4 * s + o] = weight_in * perm[s] + weight_out * outs[s][o]
    return out


A_TARGETS = _party_targets(32, 4)
B_TARGETS = _party_targets(16, 1)


def apply_to_vector(rel, vector):
    """Move the entries of any length-64 sequence (behavior or coefficients)."""
    vec = list(vector)
    out = [None] * SIZE
    for i, j in enumerate(rel.index_map()):
        out[j] = vec[i]
    return out


def apply_relabeling(rel, beh):
    return Behavior(tuple(apply_to_vector(rel, beh.entries)))


# ------------------------------------------------------------------ seeds

def seed_vertex(kind):
    """Representative vertex of each orbit type.

    ``local`` is the deterministic point a = b = 0; the nonlocal seeds put
    weight 1/k on (b - a) mod k == x*y for a, b < k.
    """
    if kind == "local":
        return Behavior.from_function(lambda x, y, a, b: 1 if a == 0 and b == 0 else 0)
    ks = {"half": 2, "third": 3, "quarter": 4}
    if kind not in ks:
        raise DomainError(f"unknown seed kind {kind!r}")
    k = ks[kind]
    return Behavior.from_function(
        lambda x, y, a, b: Fraction(1, k) if a < k and b < k and (b - a) % k == x * y else 0)


# ------------------------------------------------------------ group sweeps

def _unique_rows(rows):
    rows = np.ascontiguousarray(rows)
    flat = rows.view(np.dtype((np.void, rows.dtype.itemsize * SIZE))).ravel()
    _, first = np.unique(flat, return_index=True)
    return rows[np.sort(first)]


def orbit_rows(vector, merge_every=64):
    """All distinct images of an integer 64-vector under the full group.

    Rows come back in a deterministic but unspecified order.
    """
    vec = np.asarray(vector, dtype=np.int64)
    small = np.abs(vec).max(initial=0) < 128
    dtype = np.int8 if small else np.int64
    seen = np.zeros((0, SIZE), dtype=dtype)
    pending = []
    for ia in range(PARTY_GROUP_ORDER):
        block = kernels.relabel_block(vec, A_TARGETS[ia], B_TARGETS)
        pending.append(_unique_rows(block.astype(dtype)))
        if len(pending) == merge_every or ia == PARTY_GROUP_ORDER - 1:
            seen = _unique_rows(np.concatenate([seen] + pending))
            pending = []
    return seen.astype(np.int64)


def enumerate_orbit(seed, kind="orbit"):
    num, den = seed.integer_form()
    rows = orbit_rows(num)
    return VertexSet(kind, rows, np.full(len(rows), den, dtype=np.int64))


# ------------------------------------------------------------------ cache

def default_cache_dir():
    return Path(os.environ.get("NSCAP_CACHE", ".nscap-cache"))


def cache_path(kind, cache_dir=None):
    return Path(cache_dir or default_cache_dir()) / f"{kind}.vset"


def cached_set(kind, cache_dir=None):
    """Load a cached set or raise StateError."""
    path = cache_path(kind, cache_dir)
    if not path.exists():
        raise StateError(f"vertex set {kind!r} not cached at {path}; "
                         "run `nscap vertices all` first")
    return load_vertex_set(path)


def orbit(kind, cache_dir=None, rebuild=False):
    """Build-or-load one of the four orbits; returns ``(VertexSet, was_cached)``."""
    if kind not in ORBIT_KINDS:
        raise DomainError(f"unknown orbit kind {kind!r}")
    path = cache_path(kind, cache_dir)
    if path.exists() and not rebuild:
        return load_vertex_set(path), True
    vs = enumerate_orbit(seed_vertex(kind), kind)
    path.parent.mkdir(parents=True, exist_ok=True)
    save_vertex_set(vs, path)
    return vs, False


def build_ns_union(orbits):
    """Union of the four orbit sets given as a mapping kind -> VertexSet."""
    missing = [k for k in ORBIT_KINDS if k not in orbits]
    if missing:
        raise StateError(f"missing orbit(s) {missing}; build them first (`nscap vertices all`)")
    parts = [orbits[k] for k in ORBIT_KINDS]
    return VertexSet(UNION_KIND, np.concatenate([p.num for p in parts]),
                     np.concatenate([p.den for p in parts]))


def ns_union(cache_dir=None, rebuild=False):
    path = cache_path(UNION_KIND, cache_dir)
    if path.exists() and not rebuild:
        return load_vertex_set(path)
    vs = build_ns_union({k: orbit(k, cache_dir, rebuild)[0] for k in ORBIT_KINDS})
    path.parent.mkdir(parents=True, exist_ok=True)
    save_vertex_set(vs, path)
    return vs
