"""TF-IDF featurization of post descriptions (title followed by message)."""

from __future__ import annotations

import csv
import math
import re
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .corpus import Corpus

COUNT_MODES = ("occurrences", "documents")

# \w is Unicode-aware; underscore counts as punctuation.
_NON_ALNUM = re.compile(r"[\W_]+", re.UNICODE)


def normalize_description(title: str, message: str = "") -> list[str]:
    """Concatenate title and message, lowercase, strip punctuation, split.

    >>> normalize_description("Hello, World!", "BIG news.")
    ['hello', 'world', 'big', 'news']
    """
    text = f"{title or ''} {message or ''}".lower()
    return _NON_ALNUM.sub(" ", text).split()


def corpus_tokens(corpus: Corpus) -> list[list[str]]:
    return [normalize_description(p.title, p.message) for p in corpus.posts]


@dataclass(frozen=True)
class Vocabulary:
    words: tuple[str, ...]
    index: dict[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "index", {w: i for i, w in enumerate(self.words)})

    def __len__(self) -> int:
        return len(self.words)

    def __contains__(self, word: str) -> bool:
        return word in self.index


@dataclass(frozen=True)
class TfIdfVector:
    """Sparse weights keyed by vocabulary index, with the cached Euclidean norm."""

    weights: dict[int, float]
    norm: float

    @classmethod
    def from_weights(cls, weights: dict[int, float]) -> "TfIdfVector":
        weights = {k: weights[k] for k in sorted(weights)}
        return cls(weights, math.sqrt(sum(w * w for w in weights.values())))


def _documents(docs) -> list[list[str]]:
    if isinstance(docs, Corpus):
        return corpus_tokens(docs)
    return [normalize_description(d) if isinstance(d, str) else list(d) for d in docs]


def build_vocabulary(docs: Corpus | Iterable, min_count: int = 2,
                     count_mode: str = "occurrences") -> Vocabulary:
    """Words whose total count across all descriptions is at least ``min_count``.

    With ``count_mode="documents"`` the count is the number of descriptions
    containing the word instead.  Indices follow lexicographic word order.
    """
    if count_mode not in COUNT_MODES:
        raise ValueError(f"count_mode must be one of {COUNT_MODES}, got {count_mode!r}")
    counts: Counter = Counter()
    for tokens in _documents(docs):
        counts.update(set(tokens) if count_mode == "documents" else tokens)
    return Vocabulary(tuple(sorted(w for w, c in counts.items() if c >= min_count)))


def document_frequency(docs: Corpus | Iterable, vocab: Vocabulary) -> np.ndarray:
    df = np.zeros(len(vocab), dtype=np.int64)
    for tokens in _documents(docs):
        for w in set(tokens):
            j = vocab.index.get(w)
            if j is not None:
                df[j] += 1
    return df


def idf(docs: Corpus | Iterable, vocab: Vocabulary) -> np.ndarray:
    """Natural-log inverse document frequency, ``log(N / df)`` per vocabulary word."""
    docs = _documents(docs)
    df = document_frequency(docs, vocab)
    if np.any(df == 0):
        missing = vocab.words[int(np.argmax(df == 0))]
        raise ValueError(f"vocabulary word {missing!r} occurs in no document")
    return np.array([math.log(len(docs) / d) for d in df], dtype=np.float64)


def tfidf(tokens: Sequence[str], vocab: Vocabulary, idf_vector: np.ndarray) -> TfIdfVector:
    counts: Counter = Counter(t for t in tokens if t in vocab.index)
    weights = {vocab.index[w]: float(c) * float(idf_vector[vocab.index[w]])
               for w, c in counts.items()}
    return TfIdfVector.from_weights(weights)


def vectors_to_csr(vectors: Sequence[TfIdfVector], n_features: int) -> sp.csr_matrix:
    indptr, indices, data = [0], [], []
    for v in vectors:
        indices.extend(v.weights.keys())
        data.extend(v.weights.values())
        indptr.append(len(indices))
    return sp.csr_matrix((np.asarray(data, dtype=np.float64),
                          np.asarray(indices, dtype=np.int64),
                          np.asarray(indptr, dtype=np.int64)),
                         shape=(len(vectors), n_features))


class TfidfFeaturizer(TransformerMixin, BaseEstimator):
    """Fit a vocabulary and IDF weights on descriptions; transform to a CSR matrix.

    ``X`` is a sequence whose items are either raw description strings or
    already-normalized token lists.  Stored matrix entries equal
    ``count * idf`` exactly, with no row normalization.

    Parameters
    ----------
    min_count : int, default=2
        Minimum count for a word to enter the vocabulary.
    count_mode : {"occurrences", "documents"}, default="occurrences"
        Whether ``min_count`` applies to total occurrences or to document
        frequency.
    """

    def __init__(self, min_count: int = 2, count_mode: str = "occurrences"):
        self.min_count = min_count
        self.count_mode = count_mode

    def fit(self, X, y=None):
        docs = _documents(X)
        if self.min_count < 1:
            raise ValueError("min_count must be >= 1")
        self.vocabulary_ = build_vocabulary(docs, self.min_count, self.count_mode)
        self.document_frequency_ = document_frequency(docs, self.vocabulary_)
        self.idf_ = idf(docs, self.vocabulary_) if len(docs) else np.zeros(0)
        self.n_documents_ = len(docs)
        return self

    def vectors(self, X) -> list[TfIdfVector]:
        check_is_fitted(self, "idf_")
        return [tfidf(tokens, self.vocabulary_, self.idf_) for tokens in _documents(X)]

    def transform(self, X) -> sp.csr_matrix:
        return vectors_to_csr(self.vectors(X), len(self.vocabulary_))

    def get_feature_names_out(self, input_features=None):
        check_is_fitted(self, "idf_")
        return np.asarray(self.vocabulary_.words, dtype=object)

    def dump_vocabulary(self, path) -> None:
        """Write ``word,index,document_frequency,idf`` rows for debugging."""
        check_is_fitted(self, "idf_")
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["word", "index", "document_frequency", "idf"])
            for j, w in enumerate(self.vocabulary_.words):
                writer.writerow([w, j, int(self.document_frequency_[j]), repr(float(self.idf_[j]))])
