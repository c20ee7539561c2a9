"""End-to-end wiring: candidates -> features -> Feature Scores -> graph -> rankings."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .agreement import DEFAULT_EPSILON, AgreementGraph, build_graph
from .candidate import DEFAULT_N, CandidateSet, Model, TokenCache, build_candidates
from .corpus import Corpus, PageRankTable, QuerySpec
from .features import FEATURE_NAMES, FeatureVector, extract_features, feature_matrix, impute_missing
from .learner import ForestParams, RandomForestModel, normalize_scores, relevance_target, train
from .ranker import RankedList, Strategy, rank_ag, rank_fs, rank_raprop, rank_recency, rank_tfidf

log = logging.getLogger(__name__)


@dataclass
class QueryContext:
    cset: CandidateSet
    vectors: dict[int, FeatureVector]
    graph: AgreementGraph


def candidate_vectors(corpus: Corpus, pagerank: PageRankTable, cset: CandidateSet,
                      cache: TokenCache, extra_ids: Iterable[int] = ()) -> dict[int, FeatureVector]:
    """Imputed feature vectors for the candidate set (and any extra corpus tweets)."""
    ids = list(cset.ids) + [t for t in extra_ids if t not in cset.records and t in corpus.tweets]
    if not ids:
        return {}
    raw = [extract_features(corpus.tweets[t], cache[t], corpus.users.get(corpus.tweets[t].user_id),
                            pagerank, cset.query, cset.idf) for t in ids]
    return dict(zip(ids, impute_missing(raw)))


def prepare_query(corpus: Corpus, pagerank: PageRankTable, query: QuerySpec,
                  model: Model | str = Model.Mediator, n: int = DEFAULT_N,
                  cache: TokenCache | None = None, epsilon: float = DEFAULT_EPSILON) -> QueryContext:
    cache = cache or TokenCache(corpus)
    cset = build_candidates(corpus, query, model, n, cache)
    vectors = candidate_vectors(corpus, pagerank, cset, cache)
    graph = build_graph(cset.tweets, cset.stems, cset.idf, epsilon=epsilon)
    return QueryContext(cset, vectors, graph)


def feature_scores(forest: RandomForestModel, vectors: Mapping[int, FeatureVector]) -> dict[int, float]:
    """Forest predictions min-max normalized over the candidate set."""
    if not vectors:
        return {}
    ids = list(vectors)
    raw = forest.predict(feature_matrix([vectors[t] for t in ids]))
    return dict(zip(ids, normalize_scores(raw.tolist())))


def rank_all(ctx: QueryContext, scores: Mapping[int, float], strategies: Sequence[Strategy | str],
             plies: int = 1) -> dict[Strategy, RankedList]:
    out: dict[Strategy, RankedList] = {}
    for s in strategies:
        s = Strategy(s)
        if s is Strategy.RAProp:
            out[s] = rank_raprop(ctx.cset, scores, ctx.graph, plies)
        elif s is Strategy.FS:
            out[s] = rank_fs(ctx.cset, scores)
        elif s is Strategy.AG:
            out[s] = rank_ag(ctx.cset, ctx.graph)
        elif s is Strategy.TS:
            out[s] = rank_recency(ctx.cset)
        else:
            out[s] = rank_tfidf(ctx.cset)
    return out


def training_matrix(corpus: Corpus, pagerank: PageRankTable, queries: Sequence[QuerySpec],
                    pairs: Mapping[tuple[str, int], int], model: Model | str = Model.Mediator,
                    n: int = DEFAULT_N, cache: TokenCache | None = None):
    """Feature rows and 0/1 targets for judged (query, tweet) pairs present in the corpus."""
    cache = cache or TokenCache(corpus)
    by_query: dict[str, list[int]] = {}
    for (qid, tid) in sorted(pairs):
        by_query.setdefault(qid, []).append(tid)
    rows, targets = [], []
    for q in queries:
        wanted = by_query.get(q.query_id)
        if not wanted:
            continue
        cset = build_candidates(corpus, q, model, n, cache)
        vectors = candidate_vectors(corpus, pagerank, cset, cache, extra_ids=wanted)
        for tid in wanted:
            if tid in vectors:
                rows.append(vectors[tid])
                targets.append(relevance_target(pairs[(q.query_id, tid)]))
    missing = len(pairs) - len(rows)
    if missing:
        log.warning("%d judged pairs had no tweet in the corpus and were skipped", missing)
    return feature_matrix(rows), np.array(targets, dtype=np.float64)


def train_forest(corpus: Corpus, pagerank: PageRankTable, queries: Sequence[QuerySpec],
                 pairs: Mapping[tuple[str, int], int], params: ForestParams = ForestParams(),
                 model: Model | str = Model.Mediator, n: int = DEFAULT_N,
                 cache: TokenCache | None = None, jobs: int = 1) -> RandomForestModel:
    X, y = training_matrix(corpus, pagerank, queries, pairs, model, n, cache)
    return train(X, y, params, FEATURE_NAMES, jobs=jobs)
