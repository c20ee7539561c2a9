"""Offline dataset loading: tweets, users, PageRank table, queries and qrels.

Tweets, users and queries are JSON-lines files; qrels are TREC-style
whitespace-separated lines and PageRank is a two-column TSV.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping

from .text import normalize_url

log = logging.getLogger(__name__)

MAX_TWEET_CHARS = 140
VALID_LABELS = (-1, 0, 1)


class DataError(Exception):
    """Raised for fatal problems with an input file."""


@dataclass(frozen=True)
class TweetRecord:
    tweet_id: int
    user_id: int
    timestamp: int
    text: str
    is_retweet: bool = False
    is_reply: bool = False
    favorite_count: int = 0
    retweet_count: int = 0
    urls: tuple[str, ...] = ()

    def to_json(self) -> dict:
        return {
            "id": self.tweet_id, "user_id": self.user_id, "ts_ms": self.timestamp,
            "text": self.text, "is_rt": self.is_retweet, "is_reply": self.is_reply,
            "fav": self.favorite_count, "rt_count": self.retweet_count, "urls": list(self.urls),
        }

    @classmethod
    def from_json(cls, obj: Mapping) -> "TweetRecord":
        rec = cls(
            tweet_id=_as_int(obj["id"]),
            user_id=_as_int(obj["user_id"]),
            timestamp=_as_int(obj["ts_ms"]),
            text=str(obj["text"]),
            is_retweet=bool(obj.get("is_rt", False)),
            is_reply=bool(obj.get("is_reply", False)),
            favorite_count=_as_int(obj.get("fav", 0)),
            retweet_count=_as_int(obj.get("rt_count", 0)),
            urls=tuple(str(u) for u in obj.get("urls", []) or []),
        )
        if rec.timestamp <= 0:
            raise ValueError("timestamp must be positive")
        if rec.favorite_count < 0 or rec.retweet_count < 0:
            raise ValueError("counts must be non-negative")
        return rec


@dataclass(frozen=True)
class UserProfile:
    user_id: int
    follower_count: int | None = None
    friends_count: int | None = None
    verified: bool | None = None
    created_at: int | None = None
    statuses_count: int | None = None

    def to_json(self) -> dict:
        out: dict = {"id": self.user_id}
        for key, value in (("followers", self.follower_count), ("friends", self.friends_count),
                           ("verified", self.verified), ("created_ms", self.created_at),
                           ("statuses", self.statuses_count)):
            if value is not None:
                out[key] = value
        return out

    @classmethod
    def from_json(cls, obj: Mapping) -> "UserProfile":
        def opt_int(key):
            return None if obj.get(key) is None else _as_int(obj[key])

        rec = cls(
            user_id=_as_int(obj["id"]),
            follower_count=opt_int("followers"),
            friends_count=opt_int("friends"),
            verified=None if obj.get("verified") is None else bool(obj["verified"]),
            created_at=opt_int("created_ms"),
            statuses_count=opt_int("statuses"),
        )
        for v in (rec.follower_count, rec.friends_count, rec.statuses_count):
            if v is not None and v < 0:
                raise ValueError("counts must be non-negative")
        return rec


@dataclass(frozen=True)
class QuerySpec:
    query_id: str
    text: str
    query_time: int

    def to_json(self) -> dict:
        return {"query_id": self.query_id, "text": self.text, "query_time_ms": self.query_time}


@dataclass
class PageRankTable:
    scores: dict[str, float] = field(default_factory=dict)

    @property
    def population_mean(self) -> float:
        if not self.scores:
            return 0.0
        return sum(self.scores.values()) / len(self.scores)

    def lookup(self, url: str) -> float | None:
        return self.scores.get(normalize_url(url))

    def __len__(self) -> int:
        return len(self.scores)


@dataclass
class Corpus:
    tweets: dict[int, TweetRecord] = field(default_factory=dict)
    users: dict[int, UserProfile] = field(default_factory=dict)
    skipped: int = 0


GoldStandard = dict[tuple[str, int], int]


def _as_int(value) -> int:
    if isinstance(value, bool):
        raise ValueError("boolean is not an integer")
    if isinstance(value, float):
        if not value.is_integer():
            raise ValueError(f"not an integer: {value!r}")
        return int(value)
    return int(value)


def _read_lines(path: str | Path) -> list[str]:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read().splitlines()
    except (OSError, UnicodeDecodeError) as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc


def _load_jsonl(path, parse, kind: str) -> tuple[dict, int]:
    records: dict = {}
    skipped = 0
    for lineno, line in enumerate(_read_lines(path), 1):
        if not line.strip():
            continue
        try:
            rec = parse(json.loads(line))
        except (ValueError, KeyError, TypeError) as exc:
            log.warning("%s:%d: skipping malformed %s record (%s)", path, lineno, kind, exc)
            skipped += 1
            continue
        key = rec.tweet_id if kind == "tweet" else rec.user_id
        if key in records:
            raise DataError(f"{path}:{lineno}: duplicate {kind} id {key}")
        records[key] = rec
    return records, skipped


def load_tweets(path: str | Path) -> tuple[dict[int, TweetRecord], int]:
    tweets, skipped = _load_jsonl(path, TweetRecord.from_json, "tweet")
    long = sum(1 for t in tweets.values() if len(t.text) > MAX_TWEET_CHARS)
    if long:
        log.warning("%s: %d tweets exceed %d characters", path, long, MAX_TWEET_CHARS)
    return tweets, skipped


def load_users(path: str | Path) -> tuple[dict[int, UserProfile], int]:
    return _load_jsonl(path, UserProfile.from_json, "user")


def load_corpus(tweets_path: str | Path, users_path: str | Path | None = None) -> Corpus:
    """Load tweets (and optionally users). Malformed lines are skipped and counted."""
    tweets, skipped = load_tweets(tweets_path)
    users: dict[int, UserProfile] = {}
    if users_path is not None:
        users, skipped_users = load_users(users_path)
        skipped += skipped_users
    if skipped:
        log.warning("skipped %d malformed lines", skipped)
    return Corpus(tweets, users, skipped)


def write_corpus(corpus: Corpus, tweets_path: str | Path, users_path: str | Path | None = None) -> None:
    with open(tweets_path, "w", encoding="utf-8") as fh:
        for tid in sorted(corpus.tweets):
            fh.write(json.dumps(corpus.tweets[tid].to_json(), ensure_ascii=False) + "\n")
    if users_path is not None:
        with open(users_path, "w", encoding="utf-8") as fh:
            for uid in sorted(corpus.users):
                fh.write(json.dumps(corpus.users[uid].to_json(), ensure_ascii=False) + "\n")


def load_qrels(path: str | Path) -> GoldStandard:
    """Read ``query_id 0 tweet_id label`` lines. Any label outside {-1, 0, 1} is fatal."""
    gold: GoldStandard = {}
    for lineno, line in enumerate(_read_lines(path), 1):
        parts = line.split()
        if not parts:
            continue
        if len(parts) != 4:
            raise DataError(f"{path}:{lineno}: expected 4 columns, got {len(parts)}")
        qid, _, tid, label = parts
        try:
            tweet_id, value = int(tid), int(label)
        except ValueError as exc:
            raise DataError(f"{path}:{lineno}: {exc}") from exc
        if value not in VALID_LABELS:
            raise DataError(f"{path}:{lineno}: label {value} not in {{-1, 0, 1}}")
        if (qid, tweet_id) in gold:
            raise DataError(f"{path}:{lineno}: duplicate judgment for ({qid}, {tweet_id})")
        gold[(qid, tweet_id)] = value
    return gold


def write_qrels(gold: Mapping[tuple[str, int], int], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for (qid, tid), label in sorted(gold.items()):
            fh.write(f"{qid} 0 {tid} {label}\n")


def load_pagerank(path: str | Path) -> PageRankTable:
    table = PageRankTable()
    for lineno, line in enumerate(_read_lines(path), 1):
        if not line.strip():
            continue
        parts = line.split("\t")
        try:
            url, score = parts[0], float(parts[1])
        except (IndexError, ValueError):
            log.warning("%s:%d: skipping malformed PageRank line", path, lineno)
            continue
        if not 0.0 <= score <= 10.0:
            log.warning("%s:%d: PageRank %s outside [0, 10], skipped", path, lineno, score)
            continue
        table.scores[normalize_url(url)] = score
    return table


def write_pagerank(table: PageRankTable, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for url in sorted(table.scores):
            fh.write(f"{url}\t{table.scores[url]!r}\n")


def load_queries(path: str | Path) -> list[QuerySpec]:
    queries: list[QuerySpec] = []
    seen: set[str] = set()
    for lineno, line in enumerate(_read_lines(path), 1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
            q = QuerySpec(str(obj["query_id"]), str(obj["text"]), _as_int(obj["query_time_ms"]))
        except (ValueError, KeyError, TypeError) as exc:
            raise DataError(f"{path}:{lineno}: malformed query ({exc})") from exc
        if q.query_id in seen:
            raise DataError(f"{path}:{lineno}: duplicate query id {q.query_id}")
        seen.add(q.query_id)
        queries.append(q)
    return queries


def write_queries(queries: Iterable[QuerySpec], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for q in queries:
            fh.write(json.dumps(q.to_json(), ensure_ascii=False) + "\n")
