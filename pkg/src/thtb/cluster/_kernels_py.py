"""Pure numpy/scipy implementations of the hot cluster kernels.

Same call signatures as the compiled module ``_kernels``; all inputs are
the raw CSR buffers (data, int32 indices, int32 indptr) plus per-row
squared norms, so either implementation can be swapped in untouched.
"""

from __future__ import annotations

import numpy as np
from scipy import sparse

# Cap on floats per Gram block: ~32 MB of float64 at a time.
_BLOCK_BUDGET = 4_000_000


def _as_csr(data, indices, indptr, n_cols):
    n_rows = len(indptr) - 1
    return sparse.csr_matrix((data, indices, indptr), shape=(n_rows, n_cols))


def assign_nearest(data, indices, indptr, row_sqnorms, centroids, centroid_sqnorms):
    """Nearest centroid per row by squared Euclidean distance.

    Ties go to the lowest centroid index. Returns (labels int64, sqdist).
    """
    X = _as_csr(data, indices, indptr, centroids.shape[1])
    d = X @ centroids.T
    d *= -2.0
    d += row_sqnorms[:, None]
    d += centroid_sqnorms[None, :]
    np.maximum(d, 0.0, out=d)
    labels = np.argmin(d, axis=1).astype(np.int64)
    return labels, d[np.arange(d.shape[0]), labels]


def sqdist_to_vector(data, indices, indptr, row_sqnorms, center, center_sqnorm):
    """Squared Euclidean distance from every row to one dense vector."""
    X = _as_csr(data, indices, indptr, len(center))
    d = row_sqnorms - 2.0 * (X @ center) + center_sqnorm
    np.maximum(d, 0.0, out=d)
    return d


def cluster_distance_sums(data, indices, indptr, row_sqnorms, labels, n_clusters):
    """Per-row sums of Euclidean distances into each cluster.

    Returns sums with sums[i, c] = sum over rows j != i assigned to
    cluster c of ||x_i - x_j||. Computed blockwise off the Gram matrix.
    """
    n = len(row_sqnorms)
    n_cols = 1 if n == 0 else int(indices.max(initial=0)) + 1
    X = _as_csr(data, indices, indptr, n_cols)
    onehot = np.zeros((n, n_clusters))
    onehot[np.arange(n), labels] = 1.0
    sums = np.empty((n, n_clusters))
    block = max(1, _BLOCK_BUDGET // max(n, 1))
    for start in range(0, n, block):
        end = min(start + block, n)
        gram = np.asarray((X[start:end] @ X.T).todense())
        dist = row_sqnorms[start:end, None] + row_sqnorms[None, :] - 2.0 * gram
        np.maximum(dist, 0.0, out=dist)
        np.sqrt(dist, out=dist)
        dist[np.arange(end - start), np.arange(start, end)] = 0.0
        sums[start:end] = dist @ onehot
    return sums
