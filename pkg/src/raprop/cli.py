"""Command-line entry point: ``raprop {ingest,train,rank,eval,sweep,scenario}``.

Exit codes: 0 success, 1 usage error, 2 data error.
"""

from __future__ import annotations

import argparse
import json
import logging
import multiprocessing
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from . import __version__
from .candidate import DEFAULT_N, Model, TokenCache
from .corpus import Corpus, DataError, PageRankTable, load_corpus, load_pagerank, load_qrels, load_queries
from .evaluation import EvalReport, evaluate, evaluate_rows, ply_sweep
from .learner import ForestParams, RandomForestModel, split_gold
from .pipeline import feature_scores, prepare_query, rank_all, train_forest, training_matrix
from .ranker import RankedList, Strategy, read_run
from .scenarios import Kind, ScenarioSpec, generate

log = logging.getLogger("raprop")

EXIT_OK, EXIT_USAGE, EXIT_DATA = 0, 1, 2


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    tweets: Path | None = None
    users: Path | None = None
    pagerank: Path | None = None
    queries: Path | None = None
    qrels: Path | None = None
    model: Path | None = None
    mode: Model = Model.Mediator
    n: int = DEFAULT_N
    strategies: list[Strategy] = field(default_factory=lambda: [Strategy.RAProp])
    plies: int = 1
    seed: int = 0
    out: Path = Path(".")
    jobs: int = 1
    force: bool = False

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "RunConfig":
        def path(name):
            v = getattr(args, name, None)
            return Path(v) if v else None

        try:
            strategies = [Strategy(s.strip()) for s in getattr(args, "strategies", "RAProp").split(",") if s.strip()]
        except ValueError as exc:
            raise UsageError(f"unknown strategy: {exc}") from exc
        cfg = cls(path("tweets"), path("users"), path("pagerank"), path("queries"), path("qrels"),
                  path("model"), Model(getattr(args, "mode", "mediator")), getattr(args, "n", DEFAULT_N),
                  strategies, getattr(args, "plies", 1), getattr(args, "seed", 0),
                  Path(getattr(args, "out", ".") or "."), getattr(args, "jobs", 1), getattr(args, "force", False))
        if cfg.n < 1:
            raise UsageError("--n must be >= 1")
        if cfg.plies < 0:
            raise UsageError("--plies must be >= 0")
        if cfg.jobs < 1:
            raise UsageError("--jobs must be >= 1")
        return cfg

    def require(self, *names: str) -> None:
        for name in names:
            value = getattr(self, name)
            if value is None:
                raise UsageError(f"--{name} is required for this command")
            if name != "model" and not value.exists():
                raise DataError(f"--{name}: {value} does not exist")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _writable(path: Path, force: bool) -> Path:
    if path.exists() and not force:
        raise UsageError(f"{path} exists; pass --force to overwrite")
    path.parent.mkdir(parents=True, exist_ok=True)
    return path


def _load_inputs(cfg: RunConfig) -> tuple[Corpus, PageRankTable, list]:
    cfg.require("tweets", "queries")
    corpus = load_corpus(cfg.tweets, cfg.users if cfg.users and cfg.users.exists() else None)
    pagerank = load_pagerank(cfg.pagerank) if cfg.pagerank else PageRankTable()
    return corpus, pagerank, load_queries(cfg.queries)


def cmd_ingest(cfg: RunConfig) -> int:
    corpus, pagerank, queries = _load_inputs(cfg)
    summary = {
        "tweets": len(corpus.tweets), "users": len(corpus.users), "skipped_lines": corpus.skipped,
        "pagerank_urls": len(pagerank), "pagerank_mean": pagerank.population_mean,
        "queries": len(queries),
    }
    if cfg.qrels:
        summary["judgments"] = len(load_qrels(cfg.qrels))
    print(json.dumps(summary, indent=2))
    return EXIT_OK


def cmd_train(cfg: RunConfig, args: argparse.Namespace) -> int:
    if cfg.qrels is None:
        raise UsageError("--qrels is required to train (point it at TREC-style judgments)")
    if cfg.model is None:
        raise UsageError("--model is required (output path for the trained forest)")
    corpus, pagerank, queries = _load_inputs(cfg)
    gold = load_qrels(cfg.qrels)
    if not gold:
        raise DataError(f"{cfg.qrels}: gold standard is empty")
    model_path = _writable(cfg.model, cfg.force)
    train_pairs, test_pairs, _ = split_gold(gold, cfg.seed, args.train_frac, args.test_frac)
    params = ForestParams(bag_size=args.bag_size, max_leaves=args.max_leaves, trees=args.trees,
                          feature_subsample=args.feature_subsample, seed=cfg.seed)
    cache = TokenCache(corpus)
    forest = train_forest(corpus, pagerank, queries, train_pairs, params, cfg.mode, cfg.n, cache, cfg.jobs)
    forest.save(model_path)
    X, y = training_matrix(corpus, pagerank, queries, test_pairs, cfg.mode, cfg.n, cache)
    report = {"train_pairs": len(train_pairs), "test_pairs": len(test_pairs), "test_rows": int(len(y))}
    if len(y):
        pred = forest.predict(X)
        report["test_mse"] = float(np.mean((pred - y) ** 2))
        report["mean_predictor_mse"] = float(np.mean((y - y.mean()) ** 2))
    report_path = model_path.with_name(model_path.name + ".report.json")
    report_path.write_text(json.dumps(report, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    print(model_path)
    return EXIT_OK


# Shared with forked workers; set before the pool starts.
_WORKER_STATE: dict = {}


def _rank_query(query) -> dict[Strategy, RankedList]:
    st = _WORKER_STATE
    ctx = prepare_query(st["corpus"], st["pagerank"], query, st["mode"], st["n"], st["cache"])
    scores = feature_scores(st["forest"], ctx.vectors)
    return rank_all(ctx, scores, st["strategies"], st["plies"])


def _sweep_query(query) -> EvalReport | None:
    st = _WORKER_STATE
    ctx = prepare_query(st["corpus"], st["pagerank"], query, st["mode"], st["n"], st["cache"])
    if not len(ctx.cset):
        return None
    scores = feature_scores(st["forest"], ctx.vectors)
    return ply_sweep(ctx.cset, scores, ctx.graph, st["gold"], st["plies_max"])


def _map_queries(fn, queries, jobs: int):
    if jobs == 1 or len(queries) < 2:
        return [fn(q) for q in queries]
    ctx = multiprocessing.get_context("fork")
    with ProcessPoolExecutor(max_workers=jobs, mp_context=ctx) as pool:
        return list(pool.map(fn, queries))


def _setup_state(cfg: RunConfig, **extra):
    if cfg.model is None:
        raise UsageError("--model is required")
    if not cfg.model.exists():
        raise DataError(f"--model: {cfg.model} does not exist")
    corpus, pagerank, queries = _load_inputs(cfg)
    try:
        forest = RandomForestModel.load(cfg.model)
    except (ValueError, KeyError, TypeError) as exc:
        raise DataError(f"{cfg.model}: {exc}") from exc
    _WORKER_STATE.clear()
    _WORKER_STATE.update(corpus=corpus, pagerank=pagerank, forest=forest, mode=cfg.mode, n=cfg.n,
                         cache=TokenCache(corpus), strategies=cfg.strategies, plies=cfg.plies, **extra)
    return queries


def run_file(out: Path, query_id: str, strategy: Strategy) -> Path:
    return out / f"{query_id}.{strategy.value}.run"


def cmd_rank(cfg: RunConfig) -> int:
    queries = _setup_state(cfg)
    targets = {(q.query_id, s): run_file(cfg.out, q.query_id, s) for q in queries for s in cfg.strategies}
    for p in targets.values():
        _writable(p, cfg.force)
    for q, ranked in zip(queries, _map_queries(_rank_query, queries, cfg.jobs)):
        for s, rl in ranked.items():
            tag = f"{s.value}.p{cfg.plies}" if s is Strategy.RAProp else s.value
            rl.write(targets[(q.query_id, s)], tag)
    print(cfg.out)
    return EXIT_OK


def cmd_eval(cfg: RunConfig, args: argparse.Namespace) -> int:
    cfg.require("queries", "qrels")
    queries = load_queries(cfg.queries)
    gold = load_qrels(cfg.qrels)
    runs_dir = Path(args.runs) if args.runs else cfg.out
    runs: list[RankedList] = []
    for q in queries:
        for s in cfg.strategies:
            path = run_file(runs_dir, q.query_id, s)
            if not path.exists():
                raise DataError(f"missing run file {path}")
            found = [r for r in read_run(path) if r.query_id == q.query_id]
            entries = found[0].entries if found else ()
            runs.append(RankedList(q.query_id, entries, s))
    report = evaluate(runs, gold)
    out = _writable(cfg.out / "eval.csv", cfg.force)
    report.write(out)
    print(out)
    return EXIT_OK


def cmd_sweep(cfg: RunConfig, args: argparse.Namespace) -> int:
    cfg.require("qrels")
    if args.plies_max < 0:
        raise UsageError("--plies-max must be >= 0")
    gold = load_qrels(cfg.qrels)
    queries = _setup_state(cfg, gold=gold, plies_max=args.plies_max)
    out = _writable(cfg.out / "sweep.csv", cfg.force)
    reports = [r for r in _map_queries(_sweep_query, queries, cfg.jobs) if r is not None]
    if not reports:
        raise DataError("no query produced a candidate set")
    evaluate_rows([row for r in reports for row in r.rows]).write(out)
    print(out)
    return EXIT_OK


def cmd_scenario(args: argparse.Namespace) -> int:
    try:
        kind = Kind(args.kind)
    except ValueError:
        raise UsageError(f"unknown scenario kind {args.kind!r}; choose from {[k.value for k in Kind]}")
    out = Path(args.out)
    if out.exists() and any(out.iterdir()) and not args.force:
        raise UsageError(f"{out} is not empty; pass --force to overwrite")
    manifest = generate(ScenarioSpec(kind, seed=args.seed)).write(out)
    print(manifest)
    return EXIT_OK


def _data_flags(p: argparse.ArgumentParser, model: bool = True) -> None:
    p.add_argument("--tweets", help="tweets JSON-lines file")
    p.add_argument("--users", help="user profiles JSON-lines file")
    p.add_argument("--pagerank", help="url<TAB>pagerank file")
    p.add_argument("--queries", help="queries JSON-lines file")
    p.add_argument("--qrels", help="TREC-style judgments")
    if model:
        p.add_argument("--model", help="forest model file")
    p.add_argument("--mode", choices=[m.value for m in Model], default=Model.Mediator.value)
    p.add_argument("--n", type=int, default=DEFAULT_N, help="candidate set size (default: %(default)s)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=".", help="output directory or file prefix")
    p.add_argument("--jobs", type=int, default=1, help="parallel worker processes across queries")
    p.add_argument("--force", action="store_true", help="overwrite existing outputs")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="raprop", description="Rank tweets by propagating Feature Scores over agreement.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("ingest", help="load and validate input files")
    _data_flags(p, model=False)

    p = sub.add_parser("train", help="train the Feature Score forest")
    _data_flags(p)
    p.add_argument("--train-frac", type=float, default=0.05)
    p.add_argument("--test-frac", type=float, default=0.05)
    p.add_argument("--trees", type=int, default=100)
    p.add_argument("--bag-size", type=int, default=10)
    p.add_argument("--max-leaves", type=int, default=20)
    p.add_argument("--feature-subsample", type=float, default=1.0 / 3.0)

    for name, help_ in (("rank", "write TREC run files per query and strategy"),
                        ("sweep", "evaluate RAProp over ply counts 0..plies-max")):
        p = sub.add_parser(name, help=help_)
        _data_flags(p)
        p.add_argument("--strategies", default="RAProp",
                       help="comma-separated subset of " + ",".join(s.value for s in Strategy))
        p.add_argument("--plies", type=int, default=1)
        if name == "sweep":
            p.add_argument("--plies-max", type=int, default=3)

    p = sub.add_parser("eval", help="score run files against qrels")
    _data_flags(p, model=False)
    p.add_argument("--strategies", default="RAProp")
    p.add_argument("--runs", help="directory of run files (default: --out)")

    p = sub.add_parser("scenario", help="generate a synthetic adversarial corpus")
    p.add_argument("--kind", required=True, help=", ".join(k.value for k in Kind))
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--out", required=True)
    p.add_argument("--force", action="store_true")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if not args.command:
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    try:
        if args.command == "scenario":
            return cmd_scenario(args)
        cfg = RunConfig.from_args(args)
        if args.command == "ingest":
            return cmd_ingest(cfg)
        if args.command == "train":
            return cmd_train(cfg, args)
        if args.command == "rank":
            return cmd_rank(cfg)
        if args.command == "eval":
            return cmd_eval(cfg, args)
        return cmd_sweep(cfg, args)
    except UsageError as exc:
        print(f"raprop: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DataError, OSError, ValueError) as exc:
        print(f"raprop: data error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
