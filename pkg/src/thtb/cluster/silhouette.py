"""Per-record silhouette coefficients over a fitted clustering.

For each record, take the mean distance to the rest of its own cluster
and the smallest mean distance to any other cluster; the coefficient is
their difference over their maximum. Records alone in their cluster score
0 by convention, as do records where the two means coincide. Distances
are Euclidean on the (normalized) vectors, which on unit vectors orders
identically to cosine distance.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import sparse

from . import kernels
from .kmeans import ClusterModel
from .tfidf import TfidfModel


@dataclass(frozen=True)
class SilhouetteResult:
    """Distances and coefficient for one record (row order of the input)."""

    index: int
    nearest_cluster_mean: float  # mean distance to the closest other cluster
    own_cluster_mean: float      # mean distance to co-cluster members
    sc: float


def silhouette(model: ClusterModel, vectors) -> list[SilhouetteResult]:
    """Score every record; requires at least two clusters."""
    if model.k < 2:
        raise ValueError("silhouette requires k >= 2")
    if isinstance(vectors, TfidfModel):
        vectors = vectors.vectors
    X = sparse.csr_matrix(vectors)
    n = X.shape[0]
    labels = np.asarray(model.assignment, dtype=np.int64)
    if len(labels) != n:
        raise ValueError(f"assignment length {len(labels)} != record count {n}")

    parts = kernels.csr_parts(X)
    sums = kernels.cluster_distance_sums(parts, labels, model.k)
    counts = [int(c) for c in np.bincount(labels, minlength=model.k)]

    results: list[SilhouetteResult] = []
    for i in range(n):
        own = int(labels[i])
        other_means = [
            float(sums[i, c]) / counts[c]
            for c in range(model.k)
            if c != own and counts[c] > 0
        ]
        nearest = min(other_means) if other_means else 0.0
        if counts[own] == 1:
            results.append(
                SilhouetteResult(
                    index=i, nearest_cluster_mean=nearest, own_cluster_mean=0.0, sc=0.0
                )
            )
            continue
        within = float(sums[i, own]) / (counts[own] - 1)
        denom = max(nearest, within)
        sc = 0.0 if denom == 0.0 or nearest == within else (nearest - within) / denom
        results.append(
            SilhouetteResult(
                index=i, nearest_cluster_mean=nearest, own_cluster_mean=within, sc=sc
            )
        )
    return results
