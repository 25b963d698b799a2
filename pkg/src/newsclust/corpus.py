"""Posts and sources: data model and file ingestion.

Two on-disk formats are accepted for both files:

* JSON lines (default), one object per line.
* CSV with a header row (selected by a ``.csv`` extension).  Post reactions
  may be given either as a JSON-encoded ``reactions`` column or as seven
  flat columns named after the reaction types.
"""

from __future__ import annotations

import csv
import enum
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Iterable, Iterator

REACTION_TYPES = ("like", "love", "haha", "sad", "angry", "wow", "share")


class CorpusError(ValueError):
    """Raised when a posts or sources file fails validation."""

    def __init__(self, message: str, path: str | None = None, line: int | None = None,
                 field: str | None = None):
        self.path = path
        self.line = line
        self.field = field
        where = []
        if path is not None:
            where.append(str(path))
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field {field!r}")
        super().__init__(f"{': '.join(where)}: {message}" if where else message)


class PostFormat(enum.Enum):
    VIDEO = "video"
    PHOTO = "photo"
    TEXT = "text"


@dataclass(frozen=True)
class ReactionCounts:
    like: int = 0
    love: int = 0
    haha: int = 0
    sad: int = 0
    angry: int = 0
    wow: int = 0
    share: int = 0

    def __post_init__(self):
        for name in REACTION_TYPES:
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, int):
                raise CorpusError(f"reaction count must be an integer, got {value!r}",
                                  field=name)
            if value < 0:
                raise CorpusError(f"negative reaction count {value}", field=name)

    def as_tuple(self) -> tuple[int, ...]:
        return tuple(getattr(self, name) for name in REACTION_TYPES)

    def __add__(self, other: "ReactionCounts") -> "ReactionCounts":
        return ReactionCounts(*(a + b for a, b in zip(self.as_tuple(), other.as_tuple())))


@dataclass(frozen=True)
class Post:
    id: str
    source_id: str
    title: str
    message: str
    format: PostFormat
    published_at: int
    reactions: ReactionCounts

    @property
    def is_video(self) -> bool:
        return self.format is PostFormat.VIDEO


@dataclass(frozen=True)
class Source:
    id: str
    display_name: str
    followers: int
    utc_offset_hours: int = 0


@dataclass(frozen=True)
class Corpus:
    """Immutable, validated set of posts (sorted by id) and sources (sorted by id)."""

    posts: tuple[Post, ...]
    sources: tuple[Source, ...]

    def __post_init__(self):
        validate_corpus(self.posts, self.sources)

    def __len__(self) -> int:
        return len(self.posts)

    def source(self, source_id: str) -> Source:
        for s in self.sources:
            if s.id == source_id:
                return s
        raise KeyError(source_id)

    def posts_of(self, source_id: str) -> list[Post]:
        return [p for p in self.posts if p.source_id == source_id]

    def post_index(self) -> dict[str, int]:
        return {p.id: i for i, p in enumerate(self.posts)}

    @classmethod
    def from_records(cls, posts: Iterable[Post], sources: Iterable[Source]) -> "Corpus":
        return cls(tuple(sorted(posts, key=lambda p: p.id)),
                   tuple(sorted(sources, key=lambda s: s.id)))


def reaction_volume(post: Post | ReactionCounts) -> int:
    """Sum of likes, shares and the five emoji reactions (comments excluded)."""
    counts = post.reactions if isinstance(post, Post) else post
    return sum(counts.as_tuple())


def validate_corpus(posts: tuple[Post, ...], sources: tuple[Source, ...]) -> None:
    source_ids = set()
    for s in sources:
        if s.id in source_ids:
            raise CorpusError(f"duplicate source id {s.id!r}", field="id")
        source_ids.add(s.id)
    seen = set()
    for p in posts:
        if p.id in seen:
            raise CorpusError(f"duplicate post id {p.id!r}", field="id")
        seen.add(p.id)
        if p.source_id not in source_ids:
            raise CorpusError(f"post {p.id!r} references unknown source {p.source_id!r}",
                              field="source_id")
    if [p.id for p in posts] != sorted(seen):
        raise CorpusError("posts must be sorted by ascending id")


# -- parsing -----------------------------------------------------------------

def _require(record: dict, key: str, kind, path, line):
    if key not in record or record[key] is None:
        raise CorpusError("missing value", path, line, key)
    value = record[key]
    if kind is int:
        if isinstance(value, bool):
            raise CorpusError(f"expected integer, got {value!r}", path, line, key)
        if isinstance(value, str):
            try:
                value = int(value.strip())
            except ValueError:
                raise CorpusError(f"expected integer, got {value!r}", path, line, key) from None
        elif isinstance(value, float) and value.is_integer():
            value = int(value)
        if not isinstance(value, int):
            raise CorpusError(f"expected integer, got {value!r}", path, line, key)
    elif kind is str:
        if not isinstance(value, str):
            raise CorpusError(f"expected string, got {value!r}", path, line, key)
    return value


def _parse_reactions(record: dict, path, line) -> ReactionCounts:
    raw: Any = record.get("reactions")
    if isinstance(raw, str) and raw.strip():
        try:
            raw = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise CorpusError(f"invalid JSON: {exc.msg}", path, line, "reactions") from None
    if raw is None or raw == "":
        raw = {k: record.get(k) for k in REACTION_TYPES}
    if not isinstance(raw, dict):
        raise CorpusError("reactions must be an object", path, line, "reactions")
    counts = {}
    for name in REACTION_TYPES:
        if raw.get(name) is None:
            raise CorpusError("missing reaction count", path, line, f"reactions.{name}")
        counts[name] = _require(raw, name, int, path, line)
        if counts[name] < 0:
            raise CorpusError(f"negative reaction count {counts[name]}", path, line,
                              f"reactions.{name}")
    return ReactionCounts(**counts)


def parse_post(record: dict, path=None, line=None) -> Post:
    if not isinstance(record, dict):
        raise CorpusError("record must be an object", path, line)
    fmt = _require(record, "format", str, path, line).strip().lower()
    try:
        post_format = PostFormat(fmt)
    except ValueError:
        raise CorpusError(f"unknown format {fmt!r}", path, line, "format") from None
    published_at = _require(record, "published_at", int, path, line)
    if published_at <= 0:
        raise CorpusError(f"timestamp must be positive, got {published_at}", path, line,
                          "published_at")
    post_id = _require(record, "id", str, path, line)
    if not post_id:
        raise CorpusError("empty id", path, line, "id")
    return Post(
        id=post_id,
        source_id=_require(record, "source_id", str, path, line),
        title=record.get("title") or "",
        message=record.get("message") or "",
        format=post_format,
        published_at=published_at,
        reactions=_parse_reactions(record, path, line),
    )


def parse_source(record: dict, path=None, line=None) -> Source:
    if not isinstance(record, dict):
        raise CorpusError("record must be an object", path, line)
    followers = _require(record, "followers", int, path, line)
    if followers <= 0:
        raise CorpusError(f"followers must be positive, got {followers}", path, line,
                          "followers")
    offset = record.get("utc_offset_hours", 0)
    offset = 0 if offset in (None, "") else _require(record, "utc_offset_hours", int, path, line)
    if not -12 <= offset <= 14:
        raise CorpusError(f"utc offset {offset} outside [-12, 14]", path, line,
                          "utc_offset_hours")
    source_id = _require(record, "id", str, path, line)
    if not source_id:
        raise CorpusError("empty id", path, line, "id")
    return Source(
        id=source_id,
        display_name=record.get("display_name") or source_id,
        followers=followers,
        utc_offset_hours=offset,
    )


def iter_records(path: str | Path) -> Iterator[tuple[int, dict]]:
    """Yield ``(line_number, record)`` from a JSON-lines or CSV file."""
    path = Path(path)
    with open(path, encoding="utf-8", newline="") as fh:
        if path.suffix.lower() == ".csv":
            reader = csv.DictReader(fh)
            if reader.fieldnames is None:
                raise CorpusError("missing header row", str(path), 1)
            for row in reader:
                yield reader.line_num, dict(row)
            return
        for lineno, text in enumerate(fh, start=1):
            if not text.strip():
                continue
            try:
                yield lineno, json.loads(text)
            except json.JSONDecodeError as exc:
                raise CorpusError(f"invalid JSON: {exc.msg}", str(path), lineno) from None


def _load(path, parse):
    items, lines = [], {}
    for lineno, record in iter_records(path):
        item = parse(record, str(path), lineno)
        if item.id in lines:
            raise CorpusError(f"duplicate id {item.id!r} (first seen on line {lines[item.id]})",
                              str(path), lineno, "id")
        lines[item.id] = lineno
        items.append(item)
    return items, lines


def load_corpus(posts_path: str | Path, sources_path: str | Path) -> Corpus:
    """Load and validate a corpus; posts are returned sorted by ascending id."""
    sources, _ = _load(sources_path, parse_source)
    posts, lines = _load(posts_path, parse_post)
    known = {s.id for s in sources}
    for p in posts:
        if p.source_id not in known:
            raise CorpusError(f"unknown source {p.source_id!r}", str(posts_path),
                              lines[p.id], "source_id")
    return Corpus.from_records(posts, sources)


def post_to_record(post: Post) -> dict:
    return {
        "id": post.id,
        "source_id": post.source_id,
        "title": post.title,
        "message": post.message,
        "format": post.format.value,
        "published_at": post.published_at,
        "reactions": dict(zip(REACTION_TYPES, post.reactions.as_tuple())),
    }


def source_to_record(source: Source) -> dict:
    return {
        "id": source.id,
        "display_name": source.display_name,
        "followers": source.followers,
        "utc_offset_hours": source.utc_offset_hours,
    }


def write_jsonl(path: str | Path, records: Iterable[dict]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(rec, ensure_ascii=False, sort_keys=True) + "\n")
