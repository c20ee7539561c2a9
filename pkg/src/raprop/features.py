"""Per-(tweet, query) features over the user, tweet and web layers."""

from __future__ import annotations

import math
from dataclasses import dataclass, fields, replace
from typing import Iterable, Optional, Sequence

import numpy as np

from .agreement import IdfStats
from .corpus import PageRankTable, QuerySpec, TweetRecord, UserProfile
from .text import PosClass, TokenizedTweet, query_stems

PROXIMITY_WEIGHT = 0.2
MS_PER_DAY = 86_400_000

SMILES = (":)", ":-)", ":D", "(:")
FROWNS = (":(", ":-(", "):")


@dataclass(frozen=True)
class FeatureVector:
    # user layer
    followers: Optional[float] = None
    friends: Optional[float] = None
    verified: Optional[float] = None
    account_age_days: Optional[float] = None
    statuses: Optional[float] = None
    # tweet layer
    is_retweet: Optional[float] = 0.0
    hashtag_count: Optional[float] = 0.0
    tweet_length_chars: Optional[float] = 0.0
    has_mention: Optional[float] = 0.0
    favorite_count: Optional[float] = 0.0
    retweet_count: Optional[float] = 0.0
    has_question: Optional[float] = 0.0
    has_exclaim: Optional[float] = 0.0
    has_smile: Optional[float] = 0.0
    has_frown: Optional[float] = 0.0
    # web layer
    mean_pagerank: Optional[float] = None
    # query similarity
    proximity_tfidf: Optional[float] = 0.0

    def to_array(self) -> np.ndarray:
        values = [getattr(self, name) for name in FEATURE_NAMES]
        return np.array([np.nan if v is None else v for v in values], dtype=np.float64)

    def missing(self) -> list[str]:
        return [name for name in FEATURE_NAMES if getattr(self, name) is None]


FEATURE_NAMES: tuple[str, ...] = tuple(f.name for f in fields(FeatureVector))


def _distance_sum(tweet: TokenizedTweet, stems: Sequence[str]) -> int:
    positions: dict[str, list[int]] = {s: [] for s in stems}
    for tok in tweet.terms:
        if tok.stem in positions:
            positions[tok.stem].append(tok.position)
    length = len(tweet.tokens)
    d = 0
    for s in stems:
        mine = positions[s]
        if not mine:
            d += length
            continue
        others = [p for o in stems if o != s for p in positions[o]]
        if others:
            d += min(abs(p - q) for p in mine for q in others)
    return d


def plain_tfidf(tweet: TokenizedTweet, stems: Iterable[str], idf: IdfStats) -> float:
    """Sum over query stems of raw TF in the tweet times IDF."""
    qs = set(stems)
    counts: dict[str, int] = {}
    for tok in tweet.terms:
        if tok.stem in qs:
            counts[tok.stem] = counts.get(tok.stem, 0) + 1
    return sum(tf * idf[s] for s, tf in sorted(counts.items()))


def proximity_tfidf(tweet: TokenizedTweet, query: QuerySpec | Sequence[str], idf: IdfStats,
                    w: float = PROXIMITY_WEIGHT) -> float:
    """TF-IDF similarity decayed by how far apart the query terms sit.

    S = T * exp(-w * d / l), with l the number of distinct query stems and d the
    sum, over query stems, of the token distance to the nearest occurrence of a
    different query stem. A query stem missing from the tweet adds the tweet's
    token count to d.
    """
    stems = query_stems(query.text) if isinstance(query, QuerySpec) else list(dict.fromkeys(query))
    if not stems:
        raise ValueError("empty query")
    t = plain_tfidf(tweet, stems, idf)
    d = _distance_sum(tweet, stems)
    return t * math.exp(-w * d / len(stems))


def extract_features(tweet: TweetRecord, tokens: TokenizedTweet, user: UserProfile | None,
                     pagerank: PageRankTable, query: QuerySpec, idf: IdfStats) -> FeatureVector:
    text = tweet.text
    user = user or UserProfile(tweet.user_id)
    age = None
    if user.created_at is not None:
        age = (query.query_time - user.created_at) / MS_PER_DAY
    urls = [t.stem for t in tokens.terms if t.pos is PosClass.Url]
    ranks = [r for r in (pagerank.lookup(u) for u in urls) if r is not None]
    return FeatureVector(
        followers=_opt(user.follower_count),
        friends=_opt(user.friends_count),
        verified=None if user.verified is None else float(user.verified),
        account_age_days=age,
        statuses=_opt(user.statuses_count),
        is_retweet=float(tweet.is_retweet),
        hashtag_count=float(sum(1 for t in tokens.tokens if t.pos is PosClass.Hashtag)),
        tweet_length_chars=float(len(text)),
        has_mention=float(any(t.pos is PosClass.Mention for t in tokens.tokens)),
        favorite_count=float(tweet.favorite_count),
        retweet_count=float(tweet.retweet_count),
        has_question=float("?" in text),
        has_exclaim=float("!" in text),
        has_smile=float(any(s in text for s in SMILES)),
        has_frown=float(any(f in text for f in FROWNS)),
        mean_pagerank=sum(ranks) / len(ranks) if ranks else None,
        proximity_tfidf=proximity_tfidf(tokens, query, idf),
    )


def _opt(v) -> float | None:
    return None if v is None else float(v)


def impute_missing(vectors: Sequence[FeatureVector]) -> list[FeatureVector]:
    """Replace missing fields by the mean of present values (0 if none are present)."""
    if not vectors:
        raise ValueError("cannot impute an empty list of feature vectors")
    means = {}
    for name in FEATURE_NAMES:
        present = [getattr(v, name) for v in vectors if getattr(v, name) is not None]
        means[name] = sum(present) / len(present) if present else 0.0
    return [replace(v, **{n: means[n] for n in v.missing()}) for v in vectors]


def feature_matrix(vectors: Sequence[FeatureVector]) -> np.ndarray:
    if not vectors:
        return np.zeros((0, len(FEATURE_NAMES)))
    return np.vstack([v.to_array() for v in vectors])
