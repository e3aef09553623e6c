# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels; see :mod:`nscap._pykernels` for the contracts."""
import numpy as np
cimport numpy as cnp
from libc.stdint cimport int64_t, uint64_t

cnp.import_array()

cdef extern from *:
    int __builtin_popcountll(unsigned long long) nogil


def relabel_block(seed, a_targets, b_targets):
    cdef int64_t[::1] s = np.ascontiguousarray(seed, dtype=np.int64)
    cdef int64_t[::1] at = np.ascontiguousarray(a_targets, dtype=np.int64)
    cdef int64_t[:, ::1] bt = np.ascontiguousarray(b_targets, dtype=np.int64)
    cdef Py_ssize_t nb = bt.shape[0], k, i
    out = np.zeros((nb, 64), dtype=np.int64)
    cdef int64_t[:, ::1] o = out
    cdef int xa, yb
    with nogil:
        for k in range(nb):
            for i in range(64):
                xa = 4 * (i >> 5) + ((i >> 2) & 3)
                yb = 4 * ((i >> 4) & 1) + (i & 3)
                o[k, at[xa] + bt[k, yb]] = s[i]
    return out


def adjacent_pairs(masks, plus, minus, int min_common):
    cdef uint64_t[:, ::1] m = np.ascontiguousarray(masks, dtype=np.uint64)
    cdef int64_t[::1] p = np.ascontiguousarray(plus, dtype=np.int64)
    cdef int64_t[::1] q = np.ascontiguousarray(minus, dtype=np.int64)
    cdef Py_ssize_t n = m.shape[0], w = m.shape[1]
    cdef Py_ssize_t a, b, r, k, i, j
    cdef int cnt
    cdef bint adjacent, contains
    cdef uint64_t common[64]
    if w > 64:
        raise ValueError("at most 4096 constraints supported")
    out_i = []
    out_j = []
    for a in range(p.shape[0]):
        i = p[a]
        for b in range(q.shape[0]):
            j = q[b]
            cnt = 0
            for k in range(w):
                common[k] = m[i, k] & m[j, k]
                cnt += __builtin_popcountll(common[k])
            if cnt < min_common:
                continue
            adjacent = True
            for r in range(n):
                if r == i or r == j:
                    continue
                contains = True
                for k in range(w):
                    if (m[r, k] & common[k]) != common[k]:
                        contains = False
                        break
                if contains:
                    adjacent = False
                    break
            if adjacent:
                out_i.append(i)
                out_j.append(j)
    return np.array(out_i, dtype=np.int64), np.array(out_j, dtype=np.int64)
