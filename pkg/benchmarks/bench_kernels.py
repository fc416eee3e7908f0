#!/usr/bin/env python3
"""Benchmark the compiled cluster kernels against the pure numpy/scipy fallback.

Times the two hot kernels (K-Means assignment, silhouette pairwise sums)
and an end-to-end cluster+silhouette pass on synthetic TF-IDF-like data.

Usage:
  python benchmarks/bench_kernels.py
  python benchmarks/bench_kernels.py --records 5200 --vocab 20000 --clusters 51
"""

from __future__ import annotations

import argparse
import time

import numpy as np
from scipy import sparse

from thtb.cluster import _kernels_py
from thtb.cluster import kernels as kernel_dispatch
from thtb.cluster.kernels import csr_parts
from thtb.cluster.kmeans import kmeans
from thtb.cluster.silhouette import silhouette

try:
    from thtb.cluster import _kernels as _kernels_cy
except ImportError:
    _kernels_cy = None


def synthetic_tfidf(n_records: int, vocab: int, nnz_per_row: int, seed: int) -> sparse.csr_matrix:
    """Random normalized sparse rows with a Zipf-ish column distribution."""
    rng = np.random.default_rng(seed)
    rows = np.repeat(np.arange(n_records), nnz_per_row)
    cols = (rng.zipf(1.3, size=n_records * nnz_per_row) - 1) % vocab
    vals = np.abs(rng.normal(size=n_records * nnz_per_row)) + 0.05
    matrix = sparse.csr_matrix((vals, (rows, cols)), shape=(n_records, vocab))
    matrix.sum_duplicates()
    norms = np.sqrt(np.asarray(matrix.multiply(matrix).sum(axis=1)).ravel())
    norms[norms == 0] = 1.0
    return (sparse.diags(1.0 / norms) @ matrix).tocsr()


def timeit(fn, repeats: int) -> float:
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def bench_kernels(matrix: sparse.csr_matrix, k: int, repeats: int) -> list[tuple[str, float, float]]:
    parts = csr_parts(matrix)
    rng = np.random.default_rng(0)
    centroid_rows = rng.choice(matrix.shape[0], size=k, replace=False)
    centroids = np.ascontiguousarray(matrix[centroid_rows].toarray())
    centroid_sq = np.ascontiguousarray(np.einsum("ij,ij->i", centroids, centroids))
    labels = rng.integers(0, k, size=matrix.shape[0]).astype(np.int64)

    rows = []
    for name, call in (
        ("assign_nearest", lambda impl: impl.assign_nearest(*parts, centroids, centroid_sq)),
        ("cluster_distance_sums", lambda impl: impl.cluster_distance_sums(*parts, labels, k)),
    ):
        t_py = timeit(lambda: call(_kernels_py), repeats)
        t_cy = timeit(lambda: call(_kernels_cy), repeats) if _kernels_cy else float("nan")
        rows.append((name, t_cy, t_py))
    return rows


def bench_end_to_end(matrix: sparse.csr_matrix, k: int, repeats: int) -> list[tuple[str, float, float]]:
    def run_once():
        model = kmeans(matrix, k=k, seed=3, max_iter=50)
        silhouette(model, matrix)

    timings = {}
    for label, impl in (("python", _kernels_py), ("compiled", _kernels_cy)):
        if impl is None:
            timings[label] = float("nan")
            continue
        kernel_dispatch._impl = impl
        timings[label] = timeit(run_once, repeats)
    return [("kmeans + silhouette", timings["compiled"], timings["python"])]


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--records", type=int, default=2000)
    parser.add_argument("--vocab", type=int, default=8000)
    parser.add_argument("--nnz", type=int, default=40, help="nonzeros per row")
    parser.add_argument("--clusters", type=int, default=30)
    parser.add_argument("--repeats", type=int, default=3)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    if _kernels_cy is None:
        print("note: compiled kernels not importable; timing the fallback only\n")

    matrix = synthetic_tfidf(args.records, args.vocab, args.nnz, args.seed)
    print(
        f"synthetic corpus: {matrix.shape[0]} records, vocab {matrix.shape[1]}, "
        f"nnz/row ~{matrix.nnz / matrix.shape[0]:.0f}, k={args.clusters}\n"
    )

    rows = bench_kernels(matrix, args.clusters, args.repeats)
    rows += bench_end_to_end(matrix, args.clusters, max(1, args.repeats - 1))

    width = max(len(name) for name, _, _ in rows)
    print(f"{'kernel':<{width}}  {'compiled':>12}  {'python':>12}  {'speedup':>8}")
    for name, t_cy, t_py in rows:
        speedup = t_py / t_cy if t_cy == t_cy and t_cy > 0 else float("nan")
        cy_text = f"{t_cy * 1e3:10.1f} ms" if t_cy == t_cy else "         --"
        print(f"{name:<{width}}  {cy_text}  {t_py * 1e3:10.1f} ms  {speedup:7.2f}x")


if __name__ == "__main__":
    main()
