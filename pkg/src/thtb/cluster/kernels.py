"""Kernel backend selection: compiled extension with pure-Python fallback.

The compiled module is preferred when importable; set THTB_PURE_PYTHON=1
to force the numpy/scipy fallback. ``KERNEL_BACKEND`` names the active
implementation and is recorded in run manifests.

Callers convert a CSR matrix once via ``csr_parts`` and hand the parts to
the wrapper functions below.
"""

from __future__ import annotations

import os
from typing import NamedTuple

import numpy as np
from scipy import sparse

from . import _kernels_py

if os.environ.get("THTB_PURE_PYTHON"):
    _impl = _kernels_py
    KERNEL_BACKEND = "python"
else:
    try:
        from . import _kernels as _impl  # type: ignore[no-redef]

        KERNEL_BACKEND = "compiled"
    except ImportError:
        _impl = _kernels_py
        KERNEL_BACKEND = "python"


class CsrParts(NamedTuple):
    """Canonical CSR buffers plus per-row squared norms."""

    data: np.ndarray
    indices: np.ndarray
    indptr: np.ndarray
    sqnorms: np.ndarray


def csr_parts(matrix: sparse.spmatrix) -> CsrParts:
    matrix = matrix.tocsr()
    matrix.sort_indices()
    data = np.ascontiguousarray(matrix.data, dtype=np.float64)
    indices = np.ascontiguousarray(matrix.indices, dtype=np.int32)
    indptr = np.ascontiguousarray(matrix.indptr, dtype=np.int32)
    sqnorms = np.asarray(matrix.multiply(matrix).sum(axis=1), dtype=np.float64).ravel()
    return CsrParts(data, indices, indptr, sqnorms)


def assign_nearest(parts: CsrParts, centroids: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Nearest centroid per row; ties to the lowest centroid index."""
    centroids = np.ascontiguousarray(centroids, dtype=np.float64)
    centroid_sqnorms = np.ascontiguousarray(np.einsum("ij,ij->i", centroids, centroids))
    return _impl.assign_nearest(
        parts.data, parts.indices, parts.indptr, parts.sqnorms,
        centroids, centroid_sqnorms,
    )


def sqdist_to_vector(parts: CsrParts, center: np.ndarray) -> np.ndarray:
    """Squared Euclidean distance from every row to one dense vector."""
    center = np.ascontiguousarray(center, dtype=np.float64)
    return _impl.sqdist_to_vector(
        parts.data, parts.indices, parts.indptr, parts.sqnorms,
        center, float(center @ center),
    )


def cluster_distance_sums(parts: CsrParts, labels: np.ndarray, n_clusters: int) -> np.ndarray:
    """sums[i, c] = sum of distances from row i to every other row in cluster c."""
    return _impl.cluster_distance_sums(
        parts.data, parts.indices, parts.indptr, parts.sqnorms,
        np.ascontiguousarray(labels, dtype=np.int64), int(n_clusters),
    )
