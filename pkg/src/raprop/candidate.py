"""Candidate result set construction under the mediator and non-mediator models."""

from __future__ import annotations

import enum
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .agreement import IdfStats, idf_stats
from .corpus import Corpus, QuerySpec, TweetRecord
from .text import NOUN_CLASSES, TokenizedTweet, query_stems, tokenize_tweet

DEFAULT_N = 2000
MIN_TERMS = 4
EXPANSION_TERMS = 5
NOUN_BOOST = 10.0


class Model(str, enum.Enum):
    Mediator = "mediator"
    NonMediator = "nonmediator"


@dataclass(frozen=True)
class CandidateSet:
    query: QuerySpec
    original_stems: tuple[str, ...]
    stems: tuple[str, ...]
    tweets: tuple[TokenizedTweet, ...]
    records: dict[int, TweetRecord]
    model: Model
    idf: IdfStats = field(default_factory=lambda: IdfStats(0, {}))

    @property
    def ids(self) -> list[int]:
        return [t.tweet_id for t in self.tweets]

    def __len__(self) -> int:
        return len(self.tweets)


class TokenCache:
    """Memoizes tokenization of corpus tweets and a stem -> tweet id index."""

    def __init__(self, corpus: Corpus):
        self.corpus = corpus
        self._cache: dict[int, TokenizedTweet] = {}
        self._index: dict[str, list[int]] | None = None

    def _build_index(self) -> dict[str, list[int]]:
        if self._index is None:
            index: dict[str, list[int]] = defaultdict(list)
            for tid in self.corpus.tweets:
                for s in _stems_of(self[tid]):
                    index[s].append(tid)
            self._index = dict(index)
        return self._index

    def matching(self, stems: Iterable[str]) -> set[int]:
        index = self._build_index()
        out: set[int] = set()
        for s in stems:
            out.update(index.get(s, ()))
        return out

    def collection_idf(self) -> IdfStats:
        """IDF over the whole corpus, as a search engine's index would see it."""
        index = self._build_index()
        return IdfStats(len(self.corpus.tweets), {s: len(ids) for s, ids in index.items()})

    def __getitem__(self, tweet_id: int) -> TokenizedTweet:
        tok = self._cache.get(tweet_id)
        if tok is None:
            rec = self.corpus.tweets[tweet_id]
            tok = tokenize_tweet(rec.tweet_id, rec.text, rec.urls)
            self._cache[tweet_id] = tok
        return tok


def filter_retweets_replies(tweets: Iterable[TweetRecord]) -> list[TweetRecord]:
    return [t for t in tweets if not (t.is_retweet or t.is_reply)]


def min_term_filter(tweets: Iterable[TokenizedTweet], k: int = MIN_TERMS) -> list[TokenizedTweet]:
    return [t for t in tweets if t.term_count() >= k]


def _stems_of(tweet: TokenizedTweet) -> set[str]:
    return {t.stem for t in tweet.terms}


def expand_query(query: QuerySpec, initial: Sequence[TokenizedTweet],
                 n_terms: int = EXPANSION_TERMS) -> QuerySpec:
    """Append the top nouns of ``initial`` by summed TF times IDF to the query text."""
    existing = set(query_stems(query.text))
    idf = idf_stats(initial)
    tf: dict[str, int] = defaultdict(int)
    surface: dict[str, str] = {}
    for tw in initial:
        for tok in tw.tokens:
            if tok.pos in NOUN_CLASSES and not tok.is_stop and tok.stem not in existing:
                tf[tok.stem] += 1
                surface.setdefault(tok.stem, tok.surface)
    ranked = sorted(tf, key=lambda s: (-tf[s] * idf[s], s))[:n_terms]
    if not ranked:
        return query
    extra = " ".join(surface[s] for s in ranked)
    return QuerySpec(query.query_id, f"{query.text} {extra}", query.query_time)


def noun_boosted_tfidf(tweet: TokenizedTweet, stems: Iterable[str], idf: IdfStats,
                       boost: float = NOUN_BOOST) -> float:
    qs = set(stems)
    score = 0.0
    for tok in tweet.terms:
        if tok.stem in qs:
            score += idf[tok.stem] * (boost if tok.pos in NOUN_CLASSES else 1.0)
    return score


def _eligible(corpus: Corpus, cache: TokenCache, query: QuerySpec, stems: set[str]) -> list[TweetRecord]:
    """Keyword-matching, not-future, non-retweet/reply tweets with enough terms."""
    out = []
    for tid in sorted(cache.matching(stems)):
        rec = corpus.tweets[tid]
        if rec.is_retweet or rec.is_reply or rec.timestamp > query.query_time:
            continue
        if cache[tid].term_count() >= MIN_TERMS:
            out.append(rec)
    return out


def _keyword_matches(corpus: Corpus, cache: TokenCache, query: QuerySpec, stems: set[str]) -> list[TweetRecord]:
    recs = (corpus.tweets[tid] for tid in sorted(cache.matching(stems)))
    return [rec for rec in recs if rec.timestamp <= query.query_time]


def _recency_key(rec: TweetRecord):
    return (-rec.timestamp, rec.tweet_id)


def _finish(query: QuerySpec, original: list[str], recs: list[TweetRecord],
            cache: TokenCache, model: Model) -> CandidateSet:
    toks = tuple(cache[r.tweet_id] for r in recs)
    stems = tuple(query_stems(query.text))
    return CandidateSet(query, tuple(original), stems, toks, {r.tweet_id: r for r in recs},
                        model, idf_stats(toks))


def mediator_candidates(corpus: Corpus, query: QuerySpec, n: int = DEFAULT_N,
                        cache: TokenCache | None = None) -> CandidateSet:
    """The ``n`` most recent keyword-matching tweets, filtered, with an expanded query."""
    if n < 1:
        raise ValueError("N must be >= 1")
    cache = cache or TokenCache(corpus)
    original = query_stems(query.text)
    if not original:
        raise ValueError(f"query {query.query_id!r} has no terms")
    fetched = sorted(_keyword_matches(corpus, cache, query, set(original)), key=_recency_key)[:n]
    initial = min_term_filter([cache[r.tweet_id] for r in filter_retweets_replies(fetched)])
    expanded = expand_query(query, initial)
    # Re-selecting against the expanded query while requiring an original
    # keyword yields the same recency-ordered set, so ``initial`` is final.
    keep = {t.tweet_id for t in initial}
    return _finish(expanded, original, [r for r in fetched if r.tweet_id in keep], cache, Model.Mediator)


def nonmediator_candidates(corpus: Corpus, query: QuerySpec, n: int = DEFAULT_N,
                           cache: TokenCache | None = None) -> CandidateSet:
    """The top ``n`` eligible tweets by noun-boosted TF-IDF, with an expanded query."""
    if n < 1:
        raise ValueError("N must be >= 1")
    cache = cache or TokenCache(corpus)
    original = query_stems(query.text)
    if not original:
        raise ValueError(f"query {query.query_id!r} has no terms")
    pool = _eligible(corpus, cache, query, set(original))
    pool_toks = [cache[r.tweet_id] for r in pool]
    # Collection-wide IDF: over the keyword pool alone a one-word query would score zero everywhere.
    coll_idf = cache.collection_idf()

    def top(stems: Sequence[str]) -> list[TweetRecord]:
        scores = {t.tweet_id: noun_boosted_tfidf(t, stems, coll_idf) for t in pool_toks}
        return sorted(pool, key=lambda r: (-scores[r.tweet_id], r.tweet_id))[:n]

    initial = top(original)
    expanded = expand_query(query, [cache[r.tweet_id] for r in initial])
    final = top(query_stems(expanded.text))
    return _finish(expanded, original, final, cache, Model.NonMediator)


def build_candidates(corpus: Corpus, query: QuerySpec, model: Model | str = Model.Mediator,
                     n: int = DEFAULT_N, cache: TokenCache | None = None) -> CandidateSet:
    model = Model(model)
    if model is Model.Mediator:
        return mediator_candidates(corpus, query, n, cache)
    return nonmediator_candidates(corpus, query, n, cache)
