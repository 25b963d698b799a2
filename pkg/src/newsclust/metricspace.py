"""Combined time + text distance between posts.

``D(a, b) = D_t(a, b) + delta * D_w(a, b)`` where ``D_t`` is the publication
delay in days (optionally squared or divided by the dataset's largest
delay) and ``D_w`` is the cosine distance of the TF-IDF vectors.
"""

from __future__ import annotations

import enum
import struct
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .corpus import Corpus, Post
from .textfeat import TfidfFeaturizer, TfIdfVector, corpus_tokens

SECONDS_PER_DAY = 86400.0
_MATRIX_MAGIC = b"NCDM"


class TimeMode(enum.Enum):
    LINEAR = "linear"
    SQUARED = "squared"
    NORMALIZED_BY_MAX = "normalized"


@dataclass(frozen=True)
class DistanceParams:
    delta: float = 1.0
    time_mode: TimeMode = TimeMode.LINEAR

    def __post_init__(self):
        if not self.delta > 0:
            raise ValueError(f"delta must be positive, got {self.delta}")
        if not isinstance(self.time_mode, TimeMode):
            object.__setattr__(self, "time_mode", TimeMode(self.time_mode))


def _timestamp(x: Post | int | float) -> float:
    return float(x.published_at if isinstance(x, Post) else x)


def time_distance(a: Post | int, b: Post | int, mode: TimeMode = TimeMode.LINEAR,
                  max_span: float | None = None) -> float:
    """Publication delay in units of 24 hours, transformed according to ``mode``.

    ``max_span`` is the largest pairwise delay in the dataset, in days, and is
    required for :attr:`TimeMode.NORMALIZED_BY_MAX`.
    """
    days = abs(_timestamp(a) - _timestamp(b)) / SECONDS_PER_DAY
    mode = TimeMode(mode)
    if mode is TimeMode.LINEAR:
        return days
    if mode is TimeMode.SQUARED:
        return days * days
    if max_span is None or not max_span > 0:
        raise ValueError("normalized time distance requires a positive max_span")
    return days / max_span


def word_distance(u: TfIdfVector, v: TfIdfVector) -> float:
    """One minus cosine similarity.

    Identical non-empty bags (including ones whose IDF weights are all zero)
    are at distance exactly 0; otherwise a zero-norm vector is at distance 1.
    """
    if u.weights and u.weights == v.weights:
        return 0.0
    if u.norm == 0.0 or v.norm == 0.0:
        return 1.0
    if len(v.weights) < len(u.weights):
        u, v = v, u
    dot = sum(w * v.weights.get(k, 0.0) for k, w in u.weights.items())
    cos = dot / (u.norm * v.norm)
    return 1.0 - min(max(cos, 0.0), 1.0)


def combined_distance(a: Post, b: Post, va: TfIdfVector, vb: TfIdfVector,
                      params: DistanceParams = DistanceParams(),
                      max_span: float | None = None) -> float:
    return (time_distance(a, b, params.time_mode, max_span)
            + params.delta * word_distance(va, vb))


def max_time_span(timestamps) -> float:
    """Largest pairwise delay in days."""
    t = np.asarray(timestamps, dtype=np.float64)
    return float((t.max() - t.min()) / SECONDS_PER_DAY) if t.size else 0.0


def _row_keys(X: sp.csr_matrix) -> np.ndarray:
    """Group id per row such that rows with identical stored entries share an id;
    rows without stored entries get -1."""
    keys = np.full(X.shape[0], -1, dtype=np.int64)
    seen: dict = {}
    for i in range(X.shape[0]):
        lo, hi = X.indptr[i], X.indptr[i + 1]
        if hi > lo:
            k = (X.indices[lo:hi].tobytes(), X.data[lo:hi].tobytes())
            keys[i] = seen.setdefault(k, len(seen))
    return keys


def _block(rows: slice, t: np.ndarray, X: sp.csr_matrix, norms: np.ndarray, keys: np.ndarray,
           params: DistanceParams, span: float, dtype) -> np.ndarray:
    days = np.abs(t[rows, None] - t[None, :]) / SECONDS_PER_DAY
    if params.time_mode is TimeMode.SQUARED:
        days = days * days
    elif params.time_mode is TimeMode.NORMALIZED_BY_MAX:
        days = days / span
    dots = np.asarray((X[rows] @ X.T).todense(), dtype=np.float64)
    denom = norms[rows, None] * norms[None, :]
    with np.errstate(divide="ignore", invalid="ignore"):
        cos = np.where(denom > 0, dots / denom, 0.0)
    word = 1.0 - np.clip(cos, 0.0, 1.0)
    word[(keys[rows, None] == keys[None, :]) & (keys[rows, None] >= 0)] = 0.0
    return (days + params.delta * word).astype(dtype, copy=False)


def pairwise_distances(timestamps, X: sp.spmatrix, params: DistanceParams = DistanceParams(),
                       n_jobs: int = 1, block_size: int = 256,
                       dtype=np.float64) -> np.ndarray:
    """Dense symmetric distance matrix from timestamps and a TF-IDF matrix.

    Row blocks are computed independently, so the result does not depend on
    ``n_jobs`` or ``block_size``.  The upper triangle is mirrored into the
    lower one to make the matrix exactly symmetric.
    """
    t = np.asarray(timestamps, dtype=np.float64)
    n = t.shape[0]
    X = sp.csr_matrix(X, dtype=np.float64)
    X.sort_indices()
    if X.shape[0] != n:
        raise ValueError(f"{n} timestamps but {X.shape[0]} feature rows")
    norms = np.sqrt(np.asarray(X.multiply(X).sum(axis=1)).ravel())
    keys = _row_keys(X)
    span = max_time_span(t) if params.time_mode is TimeMode.NORMALIZED_BY_MAX else 1.0
    if span == 0.0:
        span = 1.0  # all delays are zero
    out = np.empty((n, n), dtype=dtype)
    blocks = [slice(i, min(i + block_size, n)) for i in range(0, n, block_size)]

    def work(rows):
        out[rows] = _block(rows, t, X, norms, keys, params, span, dtype)

    if n_jobs == 1 or len(blocks) <= 1:
        for rows in blocks:
            work(rows)
    else:
        with ThreadPoolExecutor(max_workers=n_jobs if n_jobs > 0 else None) as pool:
            list(pool.map(work, blocks))
    iu = np.triu_indices(n, k=1)
    out[(iu[1], iu[0])] = out[iu]
    np.fill_diagonal(out, 0.0)
    return out


def distance_matrix(corpus: Corpus, params: DistanceParams = DistanceParams(),
                    featurizer: TfidfFeaturizer | None = None, n_jobs: int = 1,
                    dtype=np.float64) -> np.ndarray:
    """Distance matrix over ``corpus.posts`` in canonical order."""
    tokens = corpus_tokens(corpus)
    if featurizer is None:
        featurizer = TfidfFeaturizer().fit(tokens)
    X = featurizer.transform(tokens)
    return pairwise_distances([p.published_at for p in corpus.posts], X, params,
                              n_jobs=n_jobs, dtype=dtype)


# -- debug dumps --------------------------------------------------------------

def write_matrix(path, matrix: np.ndarray, params: DistanceParams) -> None:
    """Binary dump: magic, uint32 N, float64 delta, uint8 time-mode length + name,
    then N*N little-endian float32 values in row-major order."""
    n = matrix.shape[0]
    mode = params.time_mode.value.encode("ascii")
    with open(path, "wb") as fh:
        fh.write(_MATRIX_MAGIC)
        fh.write(struct.pack("<IdB", n, params.delta, len(mode)))
        fh.write(mode)
        fh.write(np.ascontiguousarray(matrix, dtype="<f4").tobytes())


def read_matrix(path) -> tuple[np.ndarray, DistanceParams]:
    with open(path, "rb") as fh:
        if fh.read(4) != _MATRIX_MAGIC:
            raise ValueError(f"{path}: not a distance matrix dump")
        n, delta, length = struct.unpack("<IdB", fh.read(struct.calcsize("<IdB")))
        mode = TimeMode(fh.read(length).decode("ascii"))
        data = np.frombuffer(fh.read(4 * n * n), dtype="<f4")
    return data.reshape(n, n).astype(np.float32), DistanceParams(delta, mode)


def write_matrix_csv(path, matrix: np.ndarray, labels) -> None:
    n = matrix.shape[0]
    if n > 100:
        raise ValueError(f"CSV matrix dump is limited to 100 rows, got {n}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("," + ",".join(labels) + "\n")
        for label, row in zip(labels, matrix):
            fh.write(label + "," + ",".join(f"{x:.9g}" for x in row) + "\n")

