import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from newsclust.corpus import (
    REACTION_TYPES, CorpusError, PostFormat, ReactionCounts, load_corpus, reaction_volume,
)

from conftest import make_post


def _post(pid, source="s1", **kw):
    rec = {"id": pid, "source_id": source, "title": "T", "message": "M", "format": "video",
           "published_at": 1_500_000_000, "reactions": {k: 1 for k in REACTION_TYPES}}
    rec.update(kw)
    return json.dumps(rec)


def _write(tmp_path, posts, sources=None):
    sources = sources if sources is not None else [
        json.dumps({"id": "s1", "display_name": "Source 1", "followers": 100,
                    "utc_offset_hours": -5})]
    pp, sp = tmp_path / "posts.jsonl", tmp_path / "sources.jsonl"
    pp.write_text("\n".join(posts) + "\n", encoding="utf-8")
    sp.write_text("\n".join(sources) + "\n", encoding="utf-8")
    return pp, sp


def test_load_round_trip(tmp_path):
    corpus = load_corpus(*_write(tmp_path, [_post("p2"), _post("p1")]))
    assert len(corpus.posts) == 2 and len(corpus.sources) == 1
    assert [p.id for p in corpus.posts] == ["p1", "p2"]
    assert corpus.posts[0].format is PostFormat.VIDEO
    assert corpus.sources[0].utc_offset_hours == -5


def test_load_twice_identical(tmp_path):
    paths = _write(tmp_path, [_post("b"), _post("a"), _post("c")])
    assert load_corpus(*paths) == load_corpus(*paths)


def test_duplicate_post_id(tmp_path):
    with pytest.raises(CorpusError, match="p1") as exc:
        load_corpus(*_write(tmp_path, [_post("p1"), _post("p1")]))
    assert exc.value.line == 2


def test_unknown_source(tmp_path):
    with pytest.raises(CorpusError, match="xyz"):
        load_corpus(*_write(tmp_path, [_post("p1", source="xyz")]))


def test_negative_reaction(tmp_path):
    bad = _post("p1", reactions={**{k: 0 for k in REACTION_TYPES}, "sad": -1})
    with pytest.raises(CorpusError, match="negative") as exc:
        load_corpus(*_write(tmp_path, [bad]))
    assert exc.value.line == 1 and exc.value.field == "reactions.sad"


@pytest.mark.parametrize("override, field", [
    ({"format": "gif"}, "format"),
    ({"published_at": 0}, "published_at"),
    ({"published_at": "soon"}, "published_at"),
    ({"id": None}, "id"),
])
def test_malformed_record_reports_line_and_field(tmp_path, override, field):
    with pytest.raises(CorpusError) as exc:
        load_corpus(*_write(tmp_path, [_post("p0"), _post("p1", **override)]))
    assert exc.value.line == 2 and exc.value.field == field
    assert "line 2" in str(exc.value)


def test_invalid_json_line(tmp_path):
    with pytest.raises(CorpusError, match="line 2"):
        load_corpus(*_write(tmp_path, [_post("p0"), "{not json"]))


def test_source_followers_must_be_positive(tmp_path):
    src = [json.dumps({"id": "s1", "display_name": "S", "followers": 0, "utc_offset_hours": 0})]
    with pytest.raises(CorpusError, match="followers"):
        load_corpus(*_write(tmp_path, [_post("p1")], src))


def test_missing_file(tmp_path):
    with pytest.raises(OSError):
        load_corpus(tmp_path / "nope.jsonl", tmp_path / "nope2.jsonl")


def test_csv_import(tmp_path):
    pp, sp = tmp_path / "posts.csv", tmp_path / "sources.csv"
    pp.write_text(
        "id,source_id,title,message,format,published_at," + ",".join(REACTION_TYPES) + "\n"
        "p2,s1,Hello,,photo,1500000000,1,2,3,4,5,6,7\n"
        'p1,s1,"Big, news",msg,text,1500003600,0,0,0,0,0,0,1\n', encoding="utf-8")
    sp.write_text("id,display_name,followers,utc_offset_hours\ns1,One,10,1\n", encoding="utf-8")
    corpus = load_corpus(pp, sp)
    assert [p.id for p in corpus.posts] == ["p1", "p2"]
    assert corpus.posts[0].title == "Big, news"
    assert reaction_volume(corpus.posts[1]) == 28


def test_csv_reactions_json_column(tmp_path):
    pp, sp = tmp_path / "posts.csv", tmp_path / "sources.csv"
    reactions = json.dumps({k: 2 for k in REACTION_TYPES}).replace('"', '""')
    pp.write_text("id,source_id,title,message,format,published_at,reactions\n"
                  f'p1,s1,a,b,video,1500000000,"{reactions}"\n', encoding="utf-8")
    sp.write_text("id,display_name,followers,utc_offset_hours\ns1,One,10,0\n", encoding="utf-8")
    assert reaction_volume(load_corpus(pp, sp).posts[0]) == 14


@pytest.mark.parametrize("counts, expected", [
    ({}, 0),
    ({"like": 10, "share": 5, "love": 1, "haha": 2, "sad": 0, "angry": 1, "wow": 0}, 19),
    ({"like": 1}, 1),
])
def test_reaction_volume(counts, expected):
    assert reaction_volume(make_post("p", **counts)) == expected


counts7 = st.lists(st.integers(0, 10**6), min_size=7, max_size=7)


@given(counts7, counts7, st.permutations(range(7)))
def test_reaction_volume_additive_and_permutation_invariant(a, b, perm):
    ra, rb = ReactionCounts(*a), ReactionCounts(*b)
    assert reaction_volume(ra + rb) == reaction_volume(ra) + reaction_volume(rb)
    assert reaction_volume(ReactionCounts(*[a[i] for i in perm])) == reaction_volume(ra)
