"""POS-weighted pairwise agreement and the agreement graph over a candidate set."""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field
from itertools import combinations
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .text import PosClass, Token, TokenizedTweet, residual

DEFAULT_EPSILON = 1e-9

POS_WEIGHTS: dict[PosClass, float] = {
    PosClass.Url: 8.0,
    PosClass.Hashtag: 6.0,
    PosClass.ProperNoun: 4.0,
    PosClass.CommonNoun: 3.0,
    PosClass.Adjective: 3.0,
    PosClass.Adverb: 3.0,
    PosClass.Numeral: 2.0,
    PosClass.Pronoun: 1.0,
    PosClass.Verb: 1.0,
    PosClass.Interjection: 0.5,
    PosClass.Preposition: 0.5,
    PosClass.Existential: 0.2,
    PosClass.Mention: 1.0,
    PosClass.Other: 1.0,
    # Stripped before agreement; listed so every class has a weight.
    PosClass.Determiner: 1.0,
    PosClass.Conjunction: 1.0,
    PosClass.Punctuation: 1.0,
}


@dataclass(frozen=True)
class IdfStats:
    """IDF(t) = ln(n / df(t)) over a candidate set; unseen stems count as df = 1."""

    n: int
    df: Mapping[str, int]

    def __getitem__(self, stem: str) -> float:
        if self.n == 0:
            return 0.0
        return math.log(self.n / self.df.get(stem, 1))

    def __len__(self) -> int:
        return len(self.df)

    def __contains__(self, stem: str) -> bool:
        return stem in self.df

    def as_dict(self) -> dict[str, float]:
        return {s: self[s] for s in self.df}


def idf_stats(tweets: Sequence[TokenizedTweet]) -> IdfStats:
    df: dict[str, int] = defaultdict(int)
    for tw in tweets:
        for s in {t.stem for t in tw.agreement_tokens}:
            df[s] += 1
    return IdfStats(len(tweets), dict(df))


@dataclass(frozen=True)
class ResidualProfile:
    """Per-stem term frequency and strongest POS weight of a tweet's residual content."""

    tf: Mapping[str, int]
    weight: Mapping[str, float]
    max_tf: int


def residual_profile(tweet: TokenizedTweet, query_stems: Iterable[str],
                     weights: Mapping[PosClass, float] = POS_WEIGHTS) -> ResidualProfile:
    tf: dict[str, int] = defaultdict(int)
    wt: dict[str, float] = {}
    for tok in residual(tweet.agreement_tokens, query_stems):
        tf[tok.stem] += 1
        wt[tok.stem] = max(wt.get(tok.stem, 0.0), weights[tok.pos])
    return ResidualProfile(dict(tf), wt, max(tf.values(), default=0))


def profile_agreement(p1: ResidualProfile, p2: ResidualProfile, idf: IdfStats) -> float:
    shared = sorted(p1.tf.keys() & p2.tf.keys())
    if not shared:
        return 0.0
    raw = 0.0
    for s in shared:
        raw += p1.tf[s] * p2.tf[s] * idf[s] ** 2 * max(p1.weight[s], p2.weight[s])
    return raw / max(p1.max_tf, p2.max_tf)


def agreement(t1: TokenizedTweet, t2: TokenizedTweet, query_stems: Iterable[str],
              idf: IdfStats, weights: Mapping[PosClass, float] = POS_WEIGHTS) -> float:
    """Agreement between two tweets' residual contents.

    Sum over shared residual stems of TF1 * TF2 * IDF^2 * P(pos), divided by
    the larger of the two tweets' highest residual TF. The POS weight of a
    shared stem is the strongest class it takes in either tweet.
    """
    qs = frozenset(query_stems)
    return profile_agreement(residual_profile(t1, qs, weights), residual_profile(t2, qs, weights), idf)


@dataclass
class AgreementGraph:
    nodes: list[int]
    adjacency: dict[int, dict[int, float]] = field(default_factory=dict)

    def __post_init__(self):
        for n in self.nodes:
            self.adjacency.setdefault(n, {})

    def add_edge(self, a: int, b: int, w: float) -> None:
        if a == b:
            raise ValueError("self-edges are not allowed")
        self.adjacency[a][b] = w
        self.adjacency[b][a] = w

    def neighbors(self, node: int) -> dict[int, float]:
        return self.adjacency[node]

    def weight(self, a: int, b: int) -> float:
        return self.adjacency[a].get(b, 0.0)

    def edges(self) -> list[tuple[int, int, float]]:
        out = []
        for a in self.nodes:
            for b, w in self.adjacency[a].items():
                if a < b:
                    out.append((a, b, w))
        return sorted(out)

    def num_edges(self) -> int:
        return sum(len(v) for v in self.adjacency.values()) // 2

    def weighted_degree(self, node: int) -> float:
        return sum(self.adjacency[node][b] for b in sorted(self.adjacency[node]))

    def components(self) -> list[set[int]]:
        seen: set[int] = set()
        comps = []
        for start in self.nodes:
            if start in seen:
                continue
            stack, comp = [start], set()
            while stack:
                n = stack.pop()
                if n in comp:
                    continue
                comp.add(n)
                stack.extend(self.adjacency[n])
            seen |= comp
            comps.append(comp)
        return comps

    def dump(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            for a, b, w in self.edges():
                fh.write(f"{a} {b} {w!r}\n")


def build_graph(tweets: Sequence[TokenizedTweet], query_stems: Iterable[str], idf: IdfStats,
                weights: Mapping[PosClass, float] = POS_WEIGHTS,
                epsilon: float = DEFAULT_EPSILON) -> AgreementGraph:
    """Agreement graph over ``tweets``, scoring only pairs that share a residual stem."""
    qs = frozenset(query_stems)
    ids = [t.tweet_id for t in tweets]
    profiles = {t.tweet_id: residual_profile(t, qs, weights) for t in tweets}
    index: dict[str, list[int]] = defaultdict(list)
    for tid in ids:
        for s in profiles[tid].tf:
            if idf[s] > 0.0:
                index[s].append(tid)
    pairs: set[tuple[int, int]] = set()
    for bucket in index.values():
        for a, b in combinations(bucket, 2):
            pairs.add((a, b) if a < b else (b, a))
    graph = AgreementGraph(ids)
    for a, b in sorted(pairs):
        w = profile_agreement(profiles[a], profiles[b], idf)
        if w > 0.0 and w >= epsilon:
            graph.add_edge(a, b, w)
    return graph


def build_graph_exhaustive(tweets: Sequence[TokenizedTweet], query_stems: Iterable[str], idf: IdfStats,
                           weights: Mapping[PosClass, float] = POS_WEIGHTS,
                           epsilon: float = DEFAULT_EPSILON) -> AgreementGraph:
    """Reference O(N^2) construction, used to check :func:`build_graph`."""
    qs = frozenset(query_stems)
    graph = AgreementGraph([t.tweet_id for t in tweets])
    for t1, t2 in combinations(tweets, 2):
        w = agreement(t1, t2, qs, idf, weights)
        if w > 0.0 and w >= epsilon:
            graph.add_edge(t1.tweet_id, t2.tweet_id, w)
    return graph
