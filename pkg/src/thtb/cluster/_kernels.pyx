# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled cluster kernels over raw CSR buffers.

Hot inner loops of K-Means assignment and the silhouette pairwise pass.
Signatures mirror ``_kernels_py``; rows must have sorted column indices
(canonical CSR), which the callers guarantee.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport INFINITY, sqrt

cnp.import_array()


def assign_nearest(
    const double[::1] data,
    const int[::1] indices,
    const int[::1] indptr,
    const double[::1] row_sqnorms,
    const double[:, ::1] centroids,
    const double[::1] centroid_sqnorms,
):
    """Nearest centroid per row by squared Euclidean distance."""
    cdef Py_ssize_t n = row_sqnorms.shape[0]
    cdef Py_ssize_t k = centroids.shape[0]
    labels_arr = np.empty(n, dtype=np.int64)
    sqd_arr = np.empty(n, dtype=np.float64)
    cdef cnp.int64_t[::1] labels = labels_arr
    cdef double[::1] sqd = sqd_arr
    cdef Py_ssize_t i, c, p, start, end, best_c
    cdef double dot, d, best

    for i in range(n):
        start = indptr[i]
        end = indptr[i + 1]
        best = INFINITY
        best_c = 0
        for c in range(k):
            dot = 0.0
            for p in range(start, end):
                dot += data[p] * centroids[c, indices[p]]
            d = row_sqnorms[i] - 2.0 * dot + centroid_sqnorms[c]
            if d < 0.0:
                d = 0.0
            if d < best:
                best = d
                best_c = c
        labels[i] = best_c
        sqd[i] = best
    return labels_arr, sqd_arr


def sqdist_to_vector(
    const double[::1] data,
    const int[::1] indices,
    const int[::1] indptr,
    const double[::1] row_sqnorms,
    const double[::1] center,
    double center_sqnorm,
):
    """Squared Euclidean distance from every row to one dense vector."""
    cdef Py_ssize_t n = row_sqnorms.shape[0]
    out_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t i, p
    cdef double dot, d

    for i in range(n):
        dot = 0.0
        for p in range(indptr[i], indptr[i + 1]):
            dot += data[p] * center[indices[p]]
        d = row_sqnorms[i] - 2.0 * dot + center_sqnorm
        out[i] = d if d > 0.0 else 0.0
    return out_arr


def cluster_distance_sums(
    const double[::1] data,
    const int[::1] indices,
    const int[::1] indptr,
    const double[::1] row_sqnorms,
    const cnp.int64_t[::1] labels,
    Py_ssize_t n_clusters,
):
    """sums[i, c] = sum over rows j != i in cluster c of ||x_i - x_j||.

    Row i is scattered into a dense buffer once, so each pair dot product
    is a plain gather over row j's nonzeros.
    """
    cdef Py_ssize_t n = row_sqnorms.shape[0]
    sums_arr = np.zeros((n, n_clusters), dtype=np.float64)
    cdef double[:, ::1] sums = sums_arr
    cdef Py_ssize_t i, j, p, n_cols
    cdef double dot, d

    n_cols = 0
    for p in range(indices.shape[0]):
        if indices[p] >= n_cols:
            n_cols = indices[p] + 1
    buffer_arr = np.zeros(max(n_cols, 1), dtype=np.float64)
    cdef double[::1] buf = buffer_arr

    for i in range(n):
        for p in range(indptr[i], indptr[i + 1]):
            buf[indices[p]] = data[p]
        for j in range(i + 1, n):
            dot = 0.0
            for p in range(indptr[j], indptr[j + 1]):
                dot += data[p] * buf[indices[p]]
            d = row_sqnorms[i] + row_sqnorms[j] - 2.0 * dot
            if d < 0.0:
                d = 0.0
            d = sqrt(d)
            sums[i, labels[j]] += d
            sums[j, labels[i]] += d
        for p in range(indptr[i], indptr[i + 1]):
            buf[indices[p]] = 0.0
    return sums_arr
