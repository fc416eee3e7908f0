"""From-scratch TF-IDF vectorization with a pinned, reproducible formula.

weight(t, d) = tf(t, d) * (ln((1 + N) / (1 + df(t))) + 1), tf = raw count,
followed by per-document L2 normalization. The vocabulary is sorted
lexicographically so column order is deterministic. Tokenization is
Unicode-aware lowercase alphanumeric runs; a character-bigram mode is
available for unsegmented scripts.
"""

from __future__ import annotations

import logging
import re
from collections import Counter
from dataclasses import dataclass

import numpy as np
from scipy import sparse

logger = logging.getLogger(__name__)

_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)

TOKENIZER_MODES = ("words", "char-bigrams")


def tokenize(text: str, mode: str = "words") -> list[str]:
    """Lowercased alphanumeric runs, or overlapping bigrams of those runs."""
    runs = _TOKEN_RE.findall(text.lower())
    if mode == "words":
        return runs
    if mode != "char-bigrams":
        raise ValueError(f"unknown tokenizer mode {mode!r}; expected one of {TOKENIZER_MODES}")
    grams: list[str] = []
    for run in runs:
        if len(run) == 1:
            grams.append(run)
        else:
            grams.extend(run[i : i + 2] for i in range(len(run) - 1))
    return grams


@dataclass
class TfidfModel:
    """Vocabulary, document frequencies, and normalized document vectors."""

    vocabulary: dict[str, int]
    doc_freq: np.ndarray
    n_docs: int
    vectors: sparse.csr_matrix
    tokenizer_mode: str = "words"

    @property
    def terms(self) -> list[str]:
        """Terms in column order."""
        return sorted(self.vocabulary, key=self.vocabulary.__getitem__)


def _document_texts(docs) -> list[str]:
    """Accept a Dataset or a plain sequence of strings."""
    records = getattr(docs, "records", None)
    if records is not None:
        return [f"{r.instruction}\n{r.response}" for r in records]
    return list(docs)


def fit_tfidf(docs, tokenizer_mode: str = "words") -> TfidfModel:
    """Vectorize documents; records with no tokens become zero vectors."""
    texts = _document_texts(docs)
    if not texts:
        raise ValueError("cannot fit TF-IDF on an empty document list")
    counts = [Counter(tokenize(text, tokenizer_mode)) for text in texts]

    vocabulary = {term: col for col, term in enumerate(sorted(set().union(*counts)))}
    n_docs = len(texts)
    doc_freq = np.zeros(len(vocabulary), dtype=np.int64)
    for counter in counts:
        for term in counter:
            doc_freq[vocabulary[term]] += 1
    idf = np.log((1.0 + n_docs) / (1.0 + doc_freq)) + 1.0

    indptr = [0]
    indices: list[int] = []
    data: list[float] = []
    empty_docs = 0
    for counter in counts:
        cols = sorted(vocabulary[term] for term in counter)
        if not cols:
            empty_docs += 1
        col_terms = {vocabulary[term]: count for term, count in counter.items()}
        for col in cols:
            indices.append(col)
            data.append(col_terms[col] * idf[col])
        indptr.append(len(indices))

    vectors = sparse.csr_matrix(
        (
            np.asarray(data, dtype=np.float64),
            np.asarray(indices, dtype=np.int32),
            np.asarray(indptr, dtype=np.int32),
        ),
        shape=(n_docs, max(len(vocabulary), 1)),
    )
    norms = np.sqrt(np.asarray(vectors.multiply(vectors).sum(axis=1)).ravel())
    scale = np.divide(1.0, norms, out=np.zeros_like(norms), where=norms > 0)
    vectors = sparse.diags(scale) @ vectors
    vectors = vectors.tocsr()
    vectors.sort_indices()

    if empty_docs:
        logger.warning("%d document(s) produced no tokens; left as zero vectors", empty_docs)
    return TfidfModel(
        vocabulary=vocabulary,
        doc_freq=doc_freq,
        n_docs=n_docs,
        vectors=vectors,
        tokenizer_mode=tokenizer_mode,
    )
