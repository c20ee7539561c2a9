"""Feature Score propagation over the agreement graph, plus baseline rankers."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

from .agreement import AgreementGraph
from .candidate import CandidateSet
from .features import plain_tfidf


class Strategy(str, enum.Enum):
    RAProp = "RAProp"
    FS = "FS"
    AG = "AG"
    TS = "TS"
    TFIDF = "TFIDF"


@dataclass(frozen=True)
class RankedList:
    query_id: str
    entries: tuple[tuple[int, float], ...]
    strategy: Strategy
    plies: int | None = None

    @property
    def tweet_ids(self) -> list[int]:
        return [tid for tid, _ in self.entries]

    def __len__(self) -> int:
        return len(self.entries)

    def to_trec(self, run_tag: str | None = None) -> str:
        tag = run_tag or self.strategy.value
        return "".join(f"{self.query_id} Q0 {tid} {rank} {score!r} {tag}\n"
                       for rank, (tid, score) in enumerate(self.entries, 1))

    def write(self, path: str | Path, run_tag: str | None = None) -> None:
        Path(path).write_text(self.to_trec(run_tag), encoding="utf-8")


def read_run(path: str | Path) -> list[RankedList]:
    """Parse a TREC run file into one RankedList per query, ordered by rank."""
    rows: dict[str, list[tuple[int, int, float, str]]] = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        parts = line.split()
        if not parts:
            continue
        if len(parts) != 6:
            raise ValueError(f"{path}:{lineno}: expected 6 columns")
        qid, _, tid, rank, score, tag = parts
        rows.setdefault(qid, []).append((int(rank), int(tid), float(score), tag))
    out = []
    for qid, items in rows.items():
        items.sort()
        tag = items[0][3]
        try:
            strategy = Strategy(tag.split(".")[0])
        except ValueError:
            strategy = Strategy.RAProp
        out.append(RankedList(qid, tuple((tid, score) for _, tid, score, _ in items), strategy))
    return out


def propagate(graph: AgreementGraph, scores: Mapping[int, float], plies: int = 1) -> dict[int, float]:
    """Apply S' = S + W S ``plies`` times, each ply reading the previous ply's scores."""
    if plies < 0:
        raise ValueError("plies must be >= 0")
    missing = [n for n in graph.nodes if n not in scores]
    if missing:
        raise KeyError(f"no score for node(s) {missing[:5]}")
    current = {n: float(scores[n]) for n in graph.nodes}
    for _ in range(plies):
        nxt = {}
        for n in graph.nodes:
            nbrs = graph.neighbors(n)
            nxt[n] = current[n] + sum(nbrs[j] * current[j] for j in sorted(nbrs))
        current = nxt
    return current


def _rank(cset: CandidateSet, scores: Mapping[int, float], strategy: Strategy,
          plies: int | None = None) -> RankedList:
    ts = {tid: rec.timestamp for tid, rec in cset.records.items()}
    order = sorted(cset.ids, key=lambda t: (-scores[t], -ts[t], t))
    return RankedList(cset.query.query_id, tuple((t, float(scores[t])) for t in order), strategy, plies)


def rank_raprop(cset: CandidateSet, feature_scores: Mapping[int, float], graph: AgreementGraph,
                plies: int = 1) -> RankedList:
    return _rank(cset, propagate(graph, feature_scores, plies), Strategy.RAProp, plies)


def rank_fs(cset: CandidateSet, feature_scores: Mapping[int, float]) -> RankedList:
    return _rank(cset, feature_scores, Strategy.FS)


def rank_ag(cset: CandidateSet, graph: AgreementGraph) -> RankedList:
    """Rank by total incident agreement (an unweighted vote count)."""
    return _rank(cset, {t: graph.weighted_degree(t) for t in cset.ids}, Strategy.AG)


def rank_recency(cset: CandidateSet) -> RankedList:
    return _rank(cset, {t: float(r.timestamp) for t, r in cset.records.items()}, Strategy.TS)


def rank_tfidf(cset: CandidateSet) -> RankedList:
    return _rank(cset, {t.tweet_id: plain_tfidf(t, cset.stems, cset.idf) for t in cset.tweets},
                 Strategy.TFIDF)


def separation_margin(scores: Mapping[int, float], good: Sequence[int], bad: Sequence[int]) -> float:
    """(min good - max bad) / max |score|: a scale-free gap between two groups."""
    scale = max(abs(v) for v in scores.values())
    if scale == 0:
        return 0.0
    return (min(scores[t] for t in good) - max(scores[t] for t in bad)) / scale
