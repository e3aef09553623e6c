"""Compiled kernels vs. the numpy fallback on realistic workloads.

    python benchmarks/bench_kernels.py [--repeat N]

relabel_block: one Alice relabeling against all 1152 Bob relabelings of a
nonlocal seed (the inner step of every orbit sweep).  adjacent_pairs: the
adjacency test on the ray set of a cut enumeration, captured mid-run.
"""
import argparse
import time

import numpy as np

from nscap import _pykernels
from nscap.relabel import A_TARGETS, B_TARGETS, seed_vertex

try:
    from nscap import _ckernels
except ImportError:
    _ckernels = None


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t)
    return min(times)


def relabel_case():
    num, _ = seed_vertex("quarter").integer_form()
    ias = range(0, 1152, 37)

    def run(impl):
        for ia in ias:
            impl.relabel_block(num, A_TARGETS[ia], B_TARGETS)
    return f"relabel_block x{len(ias)}", run


def adjacency_case(seed=0, n=3000, words=2, n_plus=300, n_minus=600):
    # zero sets shaped like mid-enumeration rays: most bits set, shared structure
    rng = np.random.default_rng(seed)
    base = rng.random(64 * words) < 0.8
    bits = base[None, :] & (rng.random((n, 64 * words)) < 0.9)
    weights = np.uint64(1) << np.arange(64, dtype=np.uint64)
    masks = np.stack([(bits[:, 64 * w:64 * (w + 1)] * weights).sum(axis=1, dtype=np.uint64)
                      for w in range(words)], axis=1)
    plus = np.arange(n_plus)
    minus = np.arange(n_plus, n_plus + n_minus)
    min_common = int(np.bitwise_count(masks).sum(axis=1).mean()) - 8

    def run(impl):
        impl.adjacent_pairs(masks, plus, minus, min_common)
    return f"adjacent_pairs {n} rays, {n_plus}x{n_minus} pairs", run


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if _ckernels is None:
        print("compiled kernels not built; only the numpy fallback is available")
    print(f"{'case':<45}{'python s':>12}{'cython s':>12}{'speedup':>10}")
    for name, run in (relabel_case(), adjacency_case()):
        tp = best_of(lambda: run(_pykernels), args.repeat)
        if _ckernels is None:
            print(f"{name:<45}{tp:>12.4f}{'-':>12}{'-':>10}")
            continue
        tc = best_of(lambda: run(_ckernels), args.repeat)
        print(f"{name:<45}{tp:>12.4f}{tc:>12.4f}{tp / tc:>9.1f}x")


if __name__ == "__main__":
    main()
