import numpy as np
import pytest

from newsclust.corpus import (
    REACTION_TYPES, Corpus, Post, PostFormat, ReactionCounts, Source, post_to_record,
    source_to_record, write_jsonl,
)

T0 = 1_500_000_000  # 2017-07-14 02:40 UTC

_TOPICS = [
    "storm hurricane coast flooding evacuation",
    "election senate vote ballot campaign",
    "football final championship goal trophy",
    "market stocks shares trading index",
    "vaccine health hospital doctors virus",
    "court judge trial verdict lawyer",
    "rocket launch space orbit satellite",
    "wildfire forest smoke firefighters blaze",
]


def make_post(pid, source="s1", title="", message="", fmt="text", t=T0, **reactions):
    return Post(pid, source, title, message, PostFormat(fmt), t, ReactionCounts(**reactions))


def make_source(sid, followers=1000, offset=0, name=None):
    return Source(sid, name or sid.upper(), followers, offset)


def synthetic_corpus(rng, n_posts=120, n_sources=5, n_events=6, noise_frac=0.3):
    """Posts around ``n_events`` topic bursts plus unrelated one-off posts."""
    sources = [make_source(f"src{i:02d}", followers=int(rng.integers(1_000, 50_000)),
                           offset=int(rng.integers(-8, 3))) for i in range(n_sources)]
    events = [(rng.integers(len(_TOPICS)), T0 + int(rng.integers(0, 30 * 86400)))
              for _ in range(n_events)]
    posts = []
    for i in range(n_posts):
        src = sources[int(rng.integers(n_sources))].id
        fmt = ["video", "photo", "text"][int(rng.integers(3))]
        reactions = {k: int(rng.integers(0, 50)) for k in REACTION_TYPES}
        reactions["like"] += 1
        if rng.random() < noise_frac:
            words = [f"unique{i}w{j}" for j in range(4)]
            t = T0 + int(rng.integers(0, 30 * 86400))
        else:
            topic, start = events[int(rng.integers(n_events))]
            vocab = _TOPICS[topic].split()
            words = list(rng.choice(vocab, size=4)) + [f"extra{i}"]
            t = start + int(rng.integers(0, 6 * 3600))
        posts.append(make_post(f"p{i:04d}", src, " ".join(words[:3]), " ".join(words[3:]),
                               fmt, t, **reactions))
    return Corpus.from_records(posts, sources)


def write_corpus(tmp_path, corpus, posts_name="posts.jsonl", sources_name="sources.jsonl"):
    pp, sp = tmp_path / posts_name, tmp_path / sources_name
    write_jsonl(pp, (post_to_record(p) for p in corpus.posts))
    write_jsonl(sp, (source_to_record(s) for s in corpus.sources))
    return pp, sp


@pytest.fixture
def rng():
    return np.random.default_rng(20171108)
