"""Timing comparison: compiled kernels vs the numpy fallback.

Runs each sparse kernel and one full training call on a document-term matrix
shaped like a real fit (a few thousand 1-minute documents against a 1000-term
vocabulary, a handful of terms per document). The dispatch in
calltopics.kernels reads CALLTOPICS_DISABLE_NUMBA at call time, so both paths
can be measured in one process.

Usage: python benchmarks/bench_kernels.py [--docs N] [--terms M] [--repeat R]
"""

import argparse
import os
import time

import numpy as np

from calltopics import kernels
from calltopics.nmf import NmfConfig, nmf_train
from calltopics.sparse import CsrMatrix


def make_corpus_like(rng, n_docs, n_terms, nnz_per_doc=25):
    rows = []
    for _ in range(n_docs):
        cols = np.sort(rng.choice(n_terms, size=nnz_per_doc, replace=False))
        vals = rng.random(nnz_per_doc) + 0.05
        vals /= np.linalg.norm(vals)
        rows.append((cols, vals))
    return CsrMatrix.from_rows(rows, n_terms)


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        times.append(time.perf_counter() - start)
    return min(times)


def run_mode(label, v, w, h, t, repeat):
    kernels.warmup()
    cases = {
        "csr_matmul (V @ Ht)": lambda: kernels.csr_matmul(v, h.T.copy()),
        "csr_t_matmul (Vt @ W)": lambda: kernels.csr_t_matmul(v, w),
        "csr_inner <V, WH>": lambda: kernels.csr_inner(v, w, h),
        "nmf_train 30 iters": lambda: nmf_train(
            v, NmfConfig(n_topics=t, max_iter=30, tol=0.0, seed=0, init="seeded-random")
        ),
    }
    results = {}
    for name, fn in cases.items():
        fn()  # warm run outside the timer
        results[name] = best_of(fn, repeat)
    print(f"\n{label} (numba_enabled={kernels.numba_enabled()})")
    for name, seconds in results.items():
        print(f"  {name:24s} {seconds * 1e3:9.2f} ms")
    return results


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--docs", type=int, default=4000)
    parser.add_argument("--terms", type=int, default=1000)
    parser.add_argument("--topics", type=int, default=10)
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()

    rng = np.random.default_rng(0)
    v = make_corpus_like(rng, args.docs, args.terms)
    w = rng.random((args.docs, args.topics))
    h = rng.random((args.topics, args.terms))
    print(
        f"matrix {v.shape[0]}x{v.shape[1]}, nnz {v.nnz} "
        f"({v.nnz / (v.shape[0] * v.shape[1]):.1%} dense), t={args.topics}"
    )

    if not kernels.HAS_NUMBA:
        print("numba is not installed; only the numpy path can run")

    os.environ.pop("CALLTOPICS_DISABLE_NUMBA", None)
    fast = run_mode("compiled", v, w, h, args.topics, args.repeat)

    os.environ["CALLTOPICS_DISABLE_NUMBA"] = "1"
    slow = run_mode("numpy fallback", v, w, h, args.topics, args.repeat)
    os.environ.pop("CALLTOPICS_DISABLE_NUMBA", None)

    if kernels.HAS_NUMBA:
        print("\nspeedup (fallback time / compiled time)")
        for name in fast:
            print(f"  {name:24s} {slow[name] / fast[name]:8.1f}x")


if __name__ == "__main__":
    main()
