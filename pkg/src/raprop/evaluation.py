"""Judged-only precision, average precision and report assembly."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .agreement import AgreementGraph
from .candidate import CandidateSet
from .ranker import RankedList, rank_raprop

CUTOFFS = (5, 10, 20, 30)
CSV_HEADER = ("query", "strategy", "plies", "p5", "p10", "p20", "p30", "ap", "judged")

Gold = Mapping[tuple[str, int], int]


def judged_labels(tweet_ids: Iterable[int], gold: Gold, query_id: str) -> list[int]:
    """Labels of the judged tweets in ranked order; unjudged tweets are skipped."""
    return [gold[(query_id, t)] for t in tweet_ids if (query_id, t) in gold]


def _ids(ranked: RankedList | Sequence[int]) -> list[int]:
    return ranked.tweet_ids if isinstance(ranked, RankedList) else list(ranked)


def precision_at_k(ranked: RankedList | Sequence[int], gold: Gold, query_id: str, k: int) -> float:
    if k < 1:
        raise ValueError("k must be >= 1")
    top = judged_labels(_ids(ranked), gold, query_id)[:k]
    if not top:
        return 0.0
    return sum(1 for label in top if label == 1) / len(top)


def average_precision(ranked: RankedList | Sequence[int], gold: Gold, query_id: str) -> float:
    relevant = sum(1 for (q, _), label in gold.items() if q == query_id and label == 1)
    if relevant == 0:
        return 0.0
    hits, total = 0, 0.0
    for r, label in enumerate(judged_labels(_ids(ranked), gold, query_id), 1):
        if label == 1:
            hits += 1
            total += hits / r
    return total / relevant


@dataclass(frozen=True)
class EvalRow:
    query: str
    strategy: str
    plies: int | None
    precision: tuple[float, ...]
    ap: float
    judged: int

    def as_csv(self) -> list[str]:
        plies = "" if self.plies is None else str(self.plies)
        return [self.query, self.strategy, plies, *(f"{p:.6f}" for p in self.precision),
                f"{self.ap:.6f}", str(self.judged)]

    def p(self, k: int) -> float:
        return self.precision[CUTOFFS.index(k)]


@dataclass
class EvalReport:
    rows: list[EvalRow] = field(default_factory=list)
    aggregates: list[EvalRow] = field(default_factory=list)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for row in self.rows + self.aggregates:
            w.writerow(row.as_csv())
        return buf.getvalue()

    def write(self, path: str | Path) -> None:
        Path(path).write_text(self.to_csv(), encoding="utf-8")

    def aggregate(self, strategy: str, plies: int | None = None) -> EvalRow:
        for row in self.aggregates:
            if row.strategy == strategy and row.plies == plies:
                return row
        raise KeyError((strategy, plies))

    def row(self, query: str, strategy: str, plies: int | None = None) -> EvalRow:
        for r in self.rows:
            if (r.query, r.strategy, r.plies) == (query, strategy, plies):
                return r
        raise KeyError((query, strategy, plies))


def evaluate_one(ranked: RankedList, gold: Gold) -> EvalRow:
    q = ranked.query_id
    judged = len(judged_labels(ranked.tweet_ids, gold, q))
    return EvalRow(q, ranked.strategy.value, ranked.plies,
                   tuple(precision_at_k(ranked, gold, q, k) for k in CUTOFFS),
                   average_precision(ranked, gold, q), judged)


def _aggregate(rows: Sequence[EvalRow]) -> list[EvalRow]:
    groups: dict[tuple[str, int | None], list[EvalRow]] = {}
    for r in rows:
        groups.setdefault((r.strategy, r.plies), []).append(r)
    out = []
    for (strategy, plies), members in groups.items():
        n = len(members)
        prec = tuple(sum(m.precision[i] for m in members) / n for i in range(len(CUTOFFS)))
        out.append(EvalRow("ALL", strategy, plies, prec, sum(m.ap for m in members) / n,
                           sum(m.judged for m in members)))
    return out


def evaluate(runs: Sequence[RankedList], gold: Gold) -> EvalReport:
    """Per-(query, strategy, plies) metrics plus one mean row per (strategy, plies)."""
    if not runs:
        raise ValueError("no runs to evaluate")
    rows = [evaluate_one(r, gold) for r in runs]
    return EvalReport(rows, _aggregate(rows))


def evaluate_rows(rows: Sequence[EvalRow]) -> EvalReport:
    """Report over precomputed rows, e.g. rows merged from several per-query sweeps."""
    rows = list(rows)
    return EvalReport(rows, _aggregate(rows))


def ply_sweep(cset: CandidateSet, feature_scores: Mapping[int, float], graph: AgreementGraph,
              gold: Gold, plies_max: int) -> EvalReport:
    runs = [rank_raprop(cset, feature_scores, graph, p) for p in range(plies_max + 1)]
    return evaluate(runs, gold)
