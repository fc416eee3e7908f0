"""Deterministic K-Means over normalized TF-IDF vectors.

Initialization is k-means++ driven by a seeded generator; iteration is
Lloyd's algorithm with squared Euclidean distances, converging when the
assignment stops changing. Empty clusters are re-seeded from the point
farthest from its assigned centroid. Given (vectors, k, seed) the result
is fully reproducible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import sparse

from . import kernels
from .tfidf import TfidfModel


@dataclass
class ClusterModel:
    """Fitted centroids and per-record assignments."""

    k: int
    centroids: np.ndarray
    assignment: np.ndarray
    inertia: float
    seed: int
    iterations_run: int
    inertia_history: list[float] = field(default_factory=list)


def auto_k(n_records: int) -> int:
    """Default cluster count: max(2, round(sqrt(N/2))), clamped to N."""
    return min(max(2, round(math.sqrt(n_records / 2.0))), max(n_records, 1))


def _vectors_of(model_or_matrix) -> sparse.csr_matrix:
    if isinstance(model_or_matrix, TfidfModel):
        return model_or_matrix.vectors
    return sparse.csr_matrix(model_or_matrix)


def _dense_row(X: sparse.csr_matrix, i: int) -> np.ndarray:
    return np.asarray(X[i].todense(), dtype=np.float64).ravel()


def _plusplus_init(
    X: sparse.csr_matrix, parts: kernels.CsrParts, k: int, rng: np.random.Generator
) -> np.ndarray:
    n, dim = X.shape
    centroids = np.zeros((k, dim), dtype=np.float64)
    first = int(rng.integers(n))
    centroids[0] = _dense_row(X, first)
    chosen = {first}
    d2 = kernels.sqdist_to_vector(parts, centroids[0])
    for j in range(1, k):
        total = float(d2.sum())
        if total > 0.0:
            candidates = np.flatnonzero(d2 > 0)
            cumulative = np.cumsum(d2[candidates])
            target = rng.random() * cumulative[-1]
            pos = min(int(np.searchsorted(cumulative, target, side="right")),
                      len(candidates) - 1)
            pick = int(candidates[pos])
        else:
            # All remaining mass is on duplicates of chosen points; take the
            # lowest-index unchosen row so k distinct slots still fill.
            pick = next(i for i in range(n) if i not in chosen)
        centroids[j] = _dense_row(X, pick)
        chosen.add(pick)
        d2 = np.minimum(d2, kernels.sqdist_to_vector(parts, centroids[j]))
    return centroids


def _group_means(
    X: sparse.csr_matrix, labels: np.ndarray, counts: np.ndarray, previous: np.ndarray
) -> np.ndarray:
    k = len(counts)
    n = X.shape[0]
    onehot = sparse.csr_matrix(
        (np.ones(n), (labels, np.arange(n))), shape=(k, n)
    )
    sums = np.asarray((onehot @ X).todense(), dtype=np.float64)
    centroids = previous.copy()
    nonempty = counts > 0
    centroids[nonempty] = sums[nonempty] / counts[nonempty, None]
    return centroids


def _reseed_empty(
    X: sparse.csr_matrix,
    sqdist: np.ndarray,
    empties: np.ndarray,
    centroids: np.ndarray,
) -> None:
    # Farthest points first; ties broken by ascending record index.
    order = np.lexsort((np.arange(len(sqdist)), -sqdist))
    for cluster, point in zip(empties, order[: len(empties)]):
        centroids[cluster] = _dense_row(X, int(point))


def lloyd(
    X: sparse.csr_matrix, centroids: np.ndarray, max_iter: int = 100
) -> tuple[np.ndarray, np.ndarray, list[float], int]:
    """Iterate assign/update from explicit initial centroids.

    Returns (labels, final centroids, inertia history, iterations run).
    Deterministic; inertia is asserted non-increasing every iteration.
    """
    k = centroids.shape[0]
    parts = kernels.csr_parts(X)
    history: list[float] = []
    labels = np.zeros(X.shape[0], dtype=np.int64)
    previous: np.ndarray | None = None
    iterations = 0
    for iterations in range(1, max_iter + 1):
        labels, sqdist = kernels.assign_nearest(parts, centroids)
        inertia = float(sqdist.sum())
        if history:
            assert inertia <= history[-1] + 1e-9 * max(1.0, history[-1]), (
                f"inertia increased: {history[-1]} -> {inertia}"
            )
        history.append(inertia)
        if previous is not None and np.array_equal(labels, previous):
            break
        counts = np.bincount(labels, minlength=k)
        centroids = _group_means(X, labels, counts, centroids)
        empties = np.flatnonzero(counts == 0)
        if empties.size:
            _reseed_empty(X, sqdist, empties, centroids)
        previous = labels
    return labels, centroids, history, iterations


def kmeans(model_or_matrix, k: int, seed: int, max_iter: int = 100) -> ClusterModel:
    """Cluster rows into k groups; deterministic given (input, k, seed)."""
    X = _vectors_of(model_or_matrix).tocsr()
    X.sort_indices()
    n = X.shape[0]
    if not 1 <= k <= n:
        raise ValueError(f"k={k} out of range for {n} record(s)")
    if max_iter < 1:
        raise ValueError("max_iter must be >= 1")

    parts = kernels.csr_parts(X)
    rng = np.random.default_rng(seed)
    initial = _plusplus_init(X, parts, k, rng)
    labels, centroids, history, iterations = lloyd(X, initial, max_iter)

    return ClusterModel(
        k=k,
        centroids=centroids,
        assignment=labels,
        inertia=history[-1],
        seed=seed,
        iterations_run=iterations,
        inertia_history=history,
    )
