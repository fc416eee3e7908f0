"""TF-IDF vectorization, K-Means clustering, and silhouette scoring."""

from .kernels import KERNEL_BACKEND
from .kmeans import ClusterModel, auto_k, kmeans
from .silhouette import SilhouetteResult, silhouette
from .tfidf import TfidfModel, fit_tfidf, tokenize

__all__ = [
    "KERNEL_BACKEND",
    "ClusterModel",
    "SilhouetteResult",
    "TfidfModel",
    "auto_k",
    "fit_tfidf",
    "kmeans",
    "silhouette",
    "tokenize",
]
