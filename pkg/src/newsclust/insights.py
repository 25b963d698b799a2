"""Topic-omission detection and the newspaper similarity map."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .corpus import REACTION_TYPES, Corpus, Source
from .eventcluster import Cluster
from .linalg import JacobiPCA


@dataclass(frozen=True)
class OmissionReport:
    cluster_id: int
    covering: tuple[str, ...]
    absent: tuple[str, ...]
    size: int
    start_time: int


def detect_omissions(clusters: Sequence[Cluster], sources: Sequence[Source | str],
                     min_coverage: int = 10) -> list[OmissionReport]:
    """Clusters covered by at least ``min_coverage`` sources, biggest first.

    Fully covered clusters are reported too, with an empty ``absent`` list.
    """
    all_ids = sorted(s if isinstance(s, str) else s.id for s in sources)
    reports = []
    for c in clusters:
        covering = set(c.sources)
        if len(covering) < min_coverage:
            continue
        reports.append(OmissionReport(
            cluster_id=c.id,
            covering=tuple(s for s in all_ids if s in covering),
            absent=tuple(s for s in all_ids if s not in covering),
            size=c.size,
            start_time=c.start_time,
        ))
    reports.sort(key=lambda r: (-r.size, r.start_time, r.cluster_id))
    return reports


@dataclass(frozen=True)
class SourceReactionMatrix:
    source_ids: tuple[str, ...]
    columns: tuple[tuple[int, str], ...]
    values: np.ndarray


def reaction_matrix(clusters: Sequence[Cluster], corpus: Corpus,
                    normalize: bool = False) -> SourceReactionMatrix:
    """Total reactions of each type, per source and per cluster.

    With ``normalize`` each (source, cluster) block of seven counts is
    divided by its sum, giving a reaction distribution.
    """
    source_ids = tuple(s.id for s in corpus.sources)
    row = {sid: i for i, sid in enumerate(source_ids)}
    k = len(REACTION_TYPES)
    values = np.zeros((len(source_ids), k * len(clusters)))
    index = corpus.post_index()
    for j, c in enumerate(clusters):
        for m in c.members:
            post = corpus.posts[index[m]]
            values[row[post.source_id], j * k:(j + 1) * k] += post.reactions.as_tuple()
    if normalize and clusters:
        blocks = values.reshape(len(source_ids), len(clusters), k)
        sums = blocks.sum(axis=2, keepdims=True)
        blocks = np.divide(blocks, sums, out=np.zeros_like(blocks), where=sums > 0)
        values = blocks.reshape(len(source_ids), -1)
    columns = tuple((c.id, r) for c in clusters for r in REACTION_TYPES)
    return SourceReactionMatrix(source_ids, columns, values)


def similarity_matrix(m: SourceReactionMatrix | np.ndarray) -> np.ndarray:
    """Cosine similarity between rows; zero rows get 0 off-diagonal and 1 on it."""
    X = np.asarray(m.values if isinstance(m, SourceReactionMatrix) else m, dtype=np.float64)
    norms = np.sqrt(np.einsum("ij,ij->i", X, X))
    n = X.shape[0]
    S = np.eye(n)
    for i in range(n):
        for j in range(i + 1, n):
            if norms[i] > 0 and norms[j] > 0:
                S[i, j] = S[j, i] = min(1.0, max(0.0, float(X[i] @ X[j]) / (norms[i] * norms[j])))
    return S


def pca_map(sim, use_distance: bool = False) -> np.ndarray:
    """2-D coordinates for each source from PCA on the similarity matrix columns.

    Each column is a datapoint described by its similarity to every source.
    ``use_distance`` feeds ``1 - similarity`` instead.
    """
    S = np.asarray(sim, dtype=np.float64)
    if S.ndim != 2 or S.shape[0] != S.shape[1]:
        raise ValueError(f"similarity matrix must be square, got shape {S.shape}")
    if S.shape[0] < 3:
        raise ValueError(f"the similarity map needs at least 3 sources (S >= 3), got {S.shape[0]}")
    data = (1.0 - S if use_distance else S).T
    return JacobiPCA(n_components=2).fit_transform(data)
