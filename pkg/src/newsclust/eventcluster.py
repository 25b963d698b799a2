"""News-event clustering: DBSCAN over a precomputed distance matrix and the
recursive refinement that re-clusters oversized clusters at tighter density.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np
from sklearn.base import BaseEstimator, ClusterMixin

from ._validation import check_distance_matrix
from .corpus import Corpus

NOISE = -1
# Guards r against accumulated float error when stepping toward r_floor.
_R_EPS = 1e-12


@dataclass(frozen=True)
class ClusterParams:
    r: float = 0.5
    nmin: int = 3
    size_max: int = 25
    width_max: float = 1.5
    r_step: float = 0.05
    nmin_step: int = 1
    r_floor: float = 0.05

    def __post_init__(self):
        if not self.r > 0:
            raise ValueError(f"r must be positive, got {self.r}")
        if self.nmin < 1:
            raise ValueError(f"nmin must be >= 1, got {self.nmin}")
        if self.size_max < 1 or not self.width_max > 0:
            raise ValueError("size_max and width_max must be positive")
        if not self.r_step > 0 or self.nmin_step < 0:
            raise ValueError("r_step must be positive and nmin_step non-negative")
        if not 0 < self.r_floor <= self.r:
            raise ValueError(f"r_floor must lie in (0, r], got {self.r_floor}")

    def max_levels(self) -> int:
        return math.ceil((self.r - self.r_floor) / self.r_step - 1e-9) + 1


@dataclass(frozen=True)
class Cluster:
    id: int
    members: tuple[str, ...]
    width: float
    start_time: int
    sources: tuple[str, ...]
    level: int = 0

    @property
    def size(self) -> int:
        return len(self.members)


@dataclass
class LevelLog:
    level: int
    r: float
    nmin: int
    n_input: int
    clusters_accepted: int = 0
    posts_accepted: int = 0
    clusters_oversized: int = 0
    posts_requeued: int = 0
    posts_noise: int = 0


def dbscan(matrix, r: float, nmin: int) -> np.ndarray:
    """Label points with cluster ids ``0..k-1`` or :data:`NOISE`.

    A point is core when its closed ``r``-neighborhood, itself included,
    holds at least ``nmin`` points.  Seeds are taken in index order and each
    cluster is expanded breadth-first before the next seed, so a border point
    reachable from several clusters joins the one with the lowest-indexed
    core point.
    """
    D = check_distance_matrix(matrix)
    n = D.shape[0]
    labels = np.full(n, NOISE, dtype=np.int64)
    if n == 0:
        return labels
    adjacency = D <= r
    neighbors = [np.flatnonzero(row) for row in adjacency]
    core = np.array([len(nb) >= nmin for nb in neighbors])
    next_id = 0
    for seed in range(n):
        if not core[seed] or labels[seed] != NOISE:
            continue
        labels[seed] = next_id
        queue = deque([seed])
        while queue:
            p = queue.popleft()
            for q in neighbors[p]:
                if labels[q] != NOISE:
                    continue
                labels[q] = next_id
                if core[q]:
                    queue.append(q)
        next_id += 1
    return labels


def cluster_width(matrix: np.ndarray, members) -> float:
    """Largest pairwise distance among ``members`` (0 for a singleton)."""
    idx = np.asarray(members, dtype=np.int64)
    if idx.size < 2:
        return 0.0
    return float(matrix[np.ix_(idx, idx)].max())


def is_oversize(size: int, width: float, params: ClusterParams = ClusterParams()) -> bool:
    return not (size < params.size_max and width < params.width_max)


@dataclass
class RecursiveResult:
    labels: np.ndarray
    levels: np.ndarray
    log: list[LevelLog] = field(default_factory=list)


def recursive_dbscan(matrix, params: ClusterParams = ClusterParams()) -> RecursiveResult:
    """Run DBSCAN, accept well-sized clusters, and re-cluster oversized ones.

    Each oversized cluster is re-clustered on its own members with
    ``r - r_step`` and ``nmin + nmin_step``.  Once ``r`` would fall below
    ``r_floor``, members of still-oversized clusters become noise.
    Returned labels are in order of acceptance; ``levels`` holds the level at
    which each point's cluster was accepted (-1 for noise).
    """
    D = check_distance_matrix(matrix)
    n = D.shape[0]
    labels = np.full(n, NOISE, dtype=np.int64)
    levels = np.full(n, -1, dtype=np.int64)
    log: list[LevelLog] = []
    pending = [np.arange(n)] if n else []
    next_id = 0
    level = 0
    while pending:
        r = params.r - level * params.r_step
        if r < params.r_floor - _R_EPS:
            break
        nmin = params.nmin + level * params.nmin_step
        entry = LevelLog(level, r, nmin, n_input=sum(len(g) for g in pending))
        requeue = []
        for group in pending:
            sub = D[np.ix_(group, group)]
            sub_labels = dbscan(sub, r, nmin)
            entry.posts_noise += int(np.sum(sub_labels == NOISE))
            for k in range(int(sub_labels.max()) + 1 if sub_labels.size else 0):
                local = np.flatnonzero(sub_labels == k)
                members = group[local]
                if is_oversize(len(members), cluster_width(sub, local), params):
                    requeue.append(members)
                    entry.clusters_oversized += 1
                    entry.posts_requeued += len(members)
                else:
                    labels[members] = next_id
                    levels[members] = level
                    next_id += 1
                    entry.clusters_accepted += 1
                    entry.posts_accepted += len(members)
        log.append(entry)
        pending = requeue
        level += 1
    return RecursiveResult(labels, levels, log)


def materialize_clusters(labels, corpus: Corpus, matrix, levels=None) -> list[Cluster]:
    """Build :class:`Cluster` records renumbered ``0..k-1`` by ascending start time.

    Ties on start time are broken by the lowest member index.
    """
    labels = np.asarray(labels)
    D = np.asarray(matrix)
    posts = corpus.posts
    groups: dict[int, list[int]] = {}
    for i, lab in enumerate(labels):
        if lab != NOISE:
            groups.setdefault(int(lab), []).append(i)
    keyed = []
    for members in groups.values():
        start = min(posts[i].published_at for i in members)
        keyed.append((start, members[0], members))
    keyed.sort()
    clusters = []
    for new_id, (start, _, members) in enumerate(keyed):
        clusters.append(Cluster(
            id=new_id,
            members=tuple(posts[i].id for i in members),
            width=cluster_width(D, members),
            start_time=start,
            sources=tuple(sorted({posts[i].source_id for i in members})),
            level=int(levels[members[0]]) if levels is not None else 0,
        ))
    return clusters


def relabel(labels, clusters: list[Cluster], corpus: Corpus) -> np.ndarray:
    """Per-post labels matching the ids of materialized clusters."""
    index = corpus.post_index()
    out = np.full(len(np.asarray(labels)), NOISE, dtype=np.int64)
    for c in clusters:
        out[[index[m] for m in c.members]] = c.id
    return out


class RecursiveDBSCAN(ClusterMixin, BaseEstimator):
    """Recursive DBSCAN on a precomputed distance matrix.

    Parameters mirror :class:`ClusterParams`.  After ``fit``:

    labels_ : ndarray of shape (n_samples,)
        Cluster id per point in order of acceptance, ``-1`` for noise.
    levels_ : ndarray of shape (n_samples,)
        Recursion level at which each point's cluster was accepted.
    log_ : list of LevelLog
    """

    def __init__(self, r=0.5, nmin=3, size_max=25, width_max=1.5, r_step=0.05,
                 nmin_step=1, r_floor=0.05):
        self.r = r
        self.nmin = nmin
        self.size_max = size_max
        self.width_max = width_max
        self.r_step = r_step
        self.nmin_step = nmin_step
        self.r_floor = r_floor

    @property
    def params_(self) -> ClusterParams:
        return ClusterParams(**self.get_params())

    def fit(self, X, y=None):
        result = recursive_dbscan(X, self.params_)
        self.labels_ = result.labels
        self.levels_ = result.levels
        self.log_ = result.log
        return self
