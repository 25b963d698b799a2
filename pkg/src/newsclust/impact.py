"""Engagement analytics: SN-scores, hourly profiles, audience synchronization,
source performance, promptness and post-format effects.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from ._validation import check_profile
from .corpus import Corpus, PostFormat, Source, reaction_volume
from .eventcluster import Cluster
from .stats import InsufficientDataError, RegressionResult, ols_regression


class NormalizationError(ValueError):
    pass


class SynchronizationError(ValueError):
    pass


def sn_scores(corpus: Corpus) -> dict[str, float]:
    """Source-normalized score per post id: volume over the source's mean volume."""
    totals: dict[str, list[int]] = {}
    for p in corpus.posts:
        totals.setdefault(p.source_id, []).append(reaction_volume(p))
    means = {}
    for source_id, volumes in totals.items():
        mean = sum(volumes) / len(volumes)
        if mean <= 0:
            raise NormalizationError(f"source {source_id!r} has zero mean reaction volume")
        means[source_id] = mean
    return {p.id: reaction_volume(p) / means[p.source_id] for p in corpus.posts}


def local_hour(timestamp: int, utc_offset_hours: int) -> int:
    return ((timestamp + utc_offset_hours * 3600) // 3600) % 24


def publication_profile(corpus: Corpus, source: Source | str) -> np.ndarray:
    """Number of posts per local hour of the day."""
    source = corpus.source(source) if isinstance(source, str) else source
    profile = np.zeros(24)
    for p in corpus.posts_of(source.id):
        profile[local_hour(p.published_at, source.utc_offset_hours)] += 1
    return profile


def reactivity_profile(corpus: Corpus, source: Source | str,
                       scores: Mapping[str, float]) -> np.ndarray:
    """Mean SN-score per local hour; hours without posts are 0."""
    source = corpus.source(source) if isinstance(source, str) else source
    sums, counts = np.zeros(24), np.zeros(24)
    for p in corpus.posts_of(source.id):
        h = local_hour(p.published_at, source.utc_offset_hours)
        sums[h] += scores[p.id]
        counts[h] += 1
    return np.divide(sums, counts, out=np.zeros(24), where=counts > 0)


def synchronization(pub, react) -> float:
    """Cosine similarity between a publication and a reactivity profile."""
    a, b = check_profile(pub), check_profile(react)
    na, nb = math.sqrt(float(a @ a)), math.sqrt(float(b @ b))
    if na == 0.0 or nb == 0.0:
        raise SynchronizationError("synchronization is undefined for an all-zero profile")
    return min(1.0, max(0.0, float(a @ b) / (na * nb)))


def performance(corpus: Corpus, source: Source | str) -> float:
    """Mean reaction volume per post per 1000 followers."""
    source = corpus.source(source) if isinstance(source, str) else source
    posts = corpus.posts_of(source.id)
    if not posts:
        return 0.0
    mean = sum(reaction_volume(p) for p in posts) / len(posts)
    return mean / (source.followers / 1000.0)


@dataclass(frozen=True)
class SourceStats:
    source_id: str
    n_posts: int
    performance: float
    synchronization: float


def source_stats(corpus: Corpus, scores: Mapping[str, float] | None = None) -> list[SourceStats]:
    """Performance and synchronization for every source that has posts."""
    scores = sn_scores(corpus) if scores is None else scores
    rows = []
    for s in corpus.sources:
        n = len(corpus.posts_of(s.id))
        if n == 0:
            continue
        sync = synchronization(publication_profile(corpus, s),
                               reactivity_profile(corpus, s, scores))
        rows.append(SourceStats(s.id, n, performance(corpus, s), sync))
    return rows


def synchronization_regression(rows: Sequence[SourceStats],
                               exclude: Iterable[str] = ()) -> RegressionResult:
    """Regress per-source performance on synchronization, after dropping ``exclude``."""
    excluded = set(exclude)
    kept = [r for r in rows if r.source_id not in excluded]
    if len(kept) < 3:
        raise InsufficientDataError(
            f"need at least 3 sources after exclusion, got {len(kept)}")
    return ols_regression([r.synchronization for r in kept], [r.performance for r in kept])


# -- promptness ----------------------------------------------------------------

@dataclass(frozen=True)
class PromptnessRecord:
    post_id: str
    cluster_id: int
    delay_hours: float
    sn_score: float


def promptness_records(clusters: Sequence[Cluster], corpus: Corpus,
                       scores: Mapping[str, float]) -> list[PromptnessRecord]:
    """Delay of each clustered post behind the first post of its cluster."""
    index = corpus.post_index()
    records = []
    for c in clusters:
        start = min(corpus.posts[index[m]].published_at for m in c.members)
        for m in c.members:
            delay = (corpus.posts[index[m]].published_at - start) / 3600.0
            records.append(PromptnessRecord(m, c.id, delay, scores[m]))
    return records


def promptness_regression(records: Sequence[PromptnessRecord],
                          window_hours: float | None = None) -> RegressionResult:
    """Regress SN-score on delay, optionally keeping only delays within ``window_hours``."""
    kept = [r for r in records if window_hours is None or r.delay_hours <= window_hours]
    if len(kept) < 3:
        raise InsufficientDataError(f"need at least 3 records, got {len(kept)}")
    return ols_regression([r.delay_hours for r in kept], [r.sn_score for r in kept])


def per_cluster_regressions(records: Sequence[PromptnessRecord],
                            window_hours: float | None = None) -> dict[int, RegressionResult]:
    """Per-cluster promptness regressions; clusters with fewer than 3 records or
    all-equal delays are skipped."""
    by_cluster: dict[int, list[PromptnessRecord]] = {}
    for r in records:
        by_cluster.setdefault(r.cluster_id, []).append(r)
    out = {}
    for cid in sorted(by_cluster):
        try:
            out[cid] = promptness_regression(by_cluster[cid], window_hours)
        except InsufficientDataError:
            continue
    return out


# -- format ----------------------------------------------------------------------

@dataclass(frozen=True)
class FormatStats:
    mean_sn_by_format: dict[str, float | None]
    video_mean: float | None
    non_video_mean: float | None
    n_clusters: int
    clusters_with_video_fraction: float | None
    eligible_clusters: int
    within_cluster_difference: float | None


def _mean(values) -> float | None:
    values = list(values)
    return sum(values) / len(values) if values else None


def format_stats(corpus: Corpus, clusters: Sequence[Cluster],
                 scores: Mapping[str, float]) -> FormatStats:
    """Video versus non-video SN-score comparison, globally and within clusters.

    Photos count as non-video.  The within-cluster difference is the
    unweighted mean, over clusters holding both kinds of post, of
    ``mean(video SN) - mean(non-video SN)``.
    """
    by_format = {f.value: _mean(scores[p.id] for p in corpus.posts if p.format is f)
                 for f in PostFormat}
    video_mean = _mean(scores[p.id] for p in corpus.posts if p.is_video)
    non_video_mean = _mean(scores[p.id] for p in corpus.posts if not p.is_video)
    index = corpus.post_index()
    with_video = 0
    diffs = []
    for c in clusters:
        posts = [corpus.posts[index[m]] for m in c.members]
        videos = [scores[p.id] for p in posts if p.is_video]
        others = [scores[p.id] for p in posts if not p.is_video]
        if videos:
            with_video += 1
            if others:
                diffs.append(_mean(videos) - _mean(others))
    return FormatStats(
        mean_sn_by_format=by_format,
        video_mean=video_mean,
        non_video_mean=non_video_mean,
        n_clusters=len(clusters),
        clusters_with_video_fraction=with_video / len(clusters) if clusters else None,
        eligible_clusters=len(diffs),
        within_cluster_difference=_mean(diffs),
    )
