"""Pure numpy implementations of the hot kernels.

Contracts match :mod:`nscap._ckernels` exactly; tests check both.
"""
import numpy as np

_FLAT = np.arange(64)
# (x, a) and (y, b) sub-indices of every flat position
XA = 4 * (_FLAT >> 5) + ((_FLAT >> 2) & 3)
YB = 4 * ((_FLAT >> 4) & 1) + (_FLAT & 3)


def relabel_block(seed, a_targets, b_targets):
    """Images of ``seed`` under one Alice relabeling combined with many Bob ones.

    ``a_targets[4*x + a]`` is Alice's contribution ``32*x' + 4*a'`` to the
    image position and ``b_targets[k, 4*y + b]`` is Bob's ``16*y' + b'``.
    Returns an array of shape ``(len(b_targets), 64)``.
    """
    seed = np.asarray(seed, dtype=np.int64)
    b_targets = np.asarray(b_targets, dtype=np.int64)
    pos = np.asarray(a_targets, dtype=np.int64)[XA][None, :] + b_targets[:, YB]
    out = np.zeros((len(b_targets), 64), dtype=np.int64)
    np.put_along_axis(out, pos, np.broadcast_to(seed, pos.shape), axis=1)
    return out


def adjacent_pairs(masks, plus, minus, min_common):
    """Combinatorial adjacency test of the double-description method.

    ``masks[r]`` is the zero set of ray ``r`` (packed in uint64 words).  A pair
    ``(i, j)`` with ``i`` in ``plus`` and ``j`` in ``minus`` is adjacent iff
    their common zero set has at least ``min_common`` members and no third
    ray's zero set contains it.  Returns two index arrays.
    """
    masks = np.ascontiguousarray(masks, dtype=np.uint64)
    plus = np.asarray(plus, dtype=np.int64)
    minus = np.asarray(minus, dtype=np.int64)
    n = len(masks)
    out_i, out_j = [], []
    if len(plus) == 0 or len(minus) == 0:
        return np.zeros(0, np.int64), np.zeros(0, np.int64)
    minus_masks = masks[minus]
    chunk = max(1, 4_000_000 // max(n, 1))
    for i in plus:
        common = minus_masks & masks[i]
        counts = np.bitwise_count(common).sum(axis=1)
        cand = np.nonzero(counts >= min_common)[0]
        for start in range(0, len(cand), chunk):
            sel = cand[start:start + chunk]
            c = common[sel]
            hit = ((masks[None, :, :] & c[:, None, :]) == c[:, None, :]).all(axis=2)
            ok = hit.sum(axis=1) == 2
            for j in minus[sel[ok]]:
                out_i.append(i)
                out_j.append(j)
    return np.array(out_i, dtype=np.int64), np.array(out_j, dtype=np.int64)
