"""Deterministic synthetic corpora for the adversarial ranking narratives.

Each scenario yields an evaluation corpus for one query plus a separate
calibration corpus (its own query, users and judgments) on which the forest
is trained, so that Feature Scores reflect reputation rather than the very
labels being evaluated. Vocabulary pools are disjoint between clusters except
for the query terms and deliberate bridges.
"""

from __future__ import annotations

import enum
import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .corpus import (Corpus, PageRankTable, QuerySpec, TweetRecord, UserProfile, write_corpus,
                     write_pagerank, write_qrels, write_queries)

BASE_TIME_MS = 1_296_950_400_000  # 2011-02-06 00:00 UTC
DAY_MS = 86_400_000
MINUTE_MS = 60_000

TRUSTED_POOL = ("senate majority recount ohio district ballots governor turnout "
                "precinct canvass tally commissioner audit certification").split()
SPAM_POOL = ("casino bonus jackpot prize crypto giveaway winner lottery "
             "voucher coupon airdrop sweepstakes").split()
SPAM_TAGS = "win free prize bonus jackpot".split()
HOAX_POOL = "explosion pentagon injured hijack smoke blast".split()
NEWS_POOL = ("earthquake tsunami magnitude coastline sendai evacuation reactor "
             "fukushima aftershock shelters casualties rescuers").split()
NEWS_TAGS = "prayforjapan jpquake tsunami2011".split()
NEWS_URLS = ("https://nhkworld.jp/news/quake", "https://apnews.com/japan-quake")
OFFTOPIC_POOLS = (
    "recipe dumplings broth noodles ginger kitchen".split(),
    "guitar concert tickets venue encore setlist".split(),
    "puppy adoption kennel veterinarian leash grooming".split(),
    "marathon sneakers stretching hydration pacing finishline".split(),
    "sunset beach surfing sand waves tide".split(),
)
STUFFING_POOL = ("anime manga cosplay figurine convention plushie merch gacha otaku arcade "
                 "idol karaoke mecha shonen chibi kawaii ramen sushi bento katana "
                 "dojo ninja samurai sakura").split()
STUFFING_TAGS = ("animefan cosplaylife mangadaily otakuclub gachalife "
                 "idolstan mechabuild chibiart").split()
CHATTER_POOL = ("coffee monday traffic homework laundry pizza weekend nap sandwich "
                "umbrella headphones charger ticket").split()
CALIBRATION_POOL = ("boats lanterns parade fireworks music vendors crowd pier "
                    "lights stage food tickets").split()


class Kind(str, enum.Enum):
    SpamBridge = "SpamBridge"
    HijackedAccount = "HijackedAccount"
    BreakingNewsCluster = "BreakingNewsCluster"


@dataclass(frozen=True)
class ScenarioSpec:
    kind: Kind
    seed: int = 7
    trusted: int = 6
    spam: int = 6
    bridges: int = 1
    cluster: int = 8
    chatter: int = 4
    on_topic: int = 12
    off_topic: tuple[int, ...] = (4, 4, 4)
    words_per_tweet: int = 6
    calibration: int = 150


@dataclass
class Scenario:
    spec: ScenarioSpec
    corpus: Corpus
    pagerank: PageRankTable
    query: QuerySpec
    gold: dict[tuple[str, int], int]
    groups: dict[str, list[int]]
    train_corpus: Corpus
    train_pagerank: PageRankTable
    train_query: QuerySpec
    train_gold: dict[tuple[str, int], int]
    topology: dict = field(default_factory=dict)

    def manifest(self) -> dict:
        spec = asdict(self.spec)
        spec["kind"] = self.spec.kind.value
        spec["off_topic"] = list(self.spec.off_topic)
        return {
            "kind": self.spec.kind.value,
            "spec": spec,
            "query": self.query.to_json(),
            "groups": self.groups,
            "topology": self.topology,
            "files": {
                "tweets": "tweets.jsonl", "users": "users.jsonl", "pagerank": "pagerank.tsv",
                "queries": "queries.jsonl", "qrels": "qrels.txt",
            },
            "train_files": {
                "tweets": "train/tweets.jsonl", "users": "train/users.jsonl",
                "pagerank": "train/pagerank.tsv", "queries": "train/queries.jsonl",
                "qrels": "train/qrels.txt",
            },
        }

    def write(self, outdir: str | Path) -> Path:
        outdir = Path(outdir)
        (outdir / "train").mkdir(parents=True, exist_ok=True)
        for base, corpus, pr, query, gold in (
            (outdir, self.corpus, self.pagerank, self.query, self.gold),
            (outdir / "train", self.train_corpus, self.train_pagerank, self.train_query, self.train_gold),
        ):
            write_corpus(corpus, base / "tweets.jsonl", base / "users.jsonl")
            write_pagerank(pr, base / "pagerank.tsv")
            write_queries([query], base / "queries.jsonl")
            write_qrels(gold, base / "qrels.txt")
        path = outdir / "manifest.json"
        path.write_text(json.dumps(self.manifest(), indent=2, sort_keys=True) + "\n", encoding="utf-8")
        return path


class _Builder:
    """Accumulates users, tweets and PageRank entries with deterministic ids and times."""

    def __init__(self, rng: np.random.Generator, id_base: int):
        self.rng = rng
        self.corpus = Corpus()
        self.pagerank = PageRankTable()
        self._next_user = id_base
        self._next_tweet = id_base * 10
        self._clock = BASE_TIME_MS

    def user(self, tier: str) -> int:
        rng = self.rng
        uid = self._next_user
        self._next_user += 1
        if tier == "celebrity":
            prof = UserProfile(uid, int(rng.integers(1_500_000, 3_000_000)), int(rng.integers(200, 800)),
                               True, BASE_TIME_MS - int(rng.integers(1500, 2500)) * DAY_MS,
                               int(rng.integers(20_000, 60_000)))
        elif tier == "high":
            prof = UserProfile(uid, int(rng.integers(50_000, 200_000)), int(rng.integers(200, 2000)),
                               True, BASE_TIME_MS - int(rng.integers(1000, 2000)) * DAY_MS,
                               int(rng.integers(5_000, 40_000)))
        elif tier == "moderate":
            prof = UserProfile(uid, int(rng.integers(500, 5_000)), int(rng.integers(200, 1500)),
                               False, BASE_TIME_MS - int(rng.integers(300, 1200)) * DAY_MS,
                               int(rng.integers(500, 8_000)))
        else:
            prof = UserProfile(uid, int(rng.integers(3, 40)), int(rng.integers(800, 2000)),
                               False, BASE_TIME_MS - int(rng.integers(1, 20)) * DAY_MS,
                               int(rng.integers(5, 200)))
        self.corpus.users[uid] = prof
        return uid

    def tweet(self, user_id: int, text: str, urls=(), fav: int = 0, rts: int = 0) -> int:
        tid = self._next_tweet
        self._next_tweet += 1
        self._clock += int(self.rng.integers(1, 30)) * MINUTE_MS
        self.corpus.tweets[tid] = TweetRecord(tid, user_id, self._clock, text, False, False,
                                              fav, rts, tuple(urls))
        return tid

    def engagement(self, tier: str) -> tuple[int, int]:
        hi = {"celebrity": 5000, "high": 400, "moderate": 20}.get(tier, 1)
        return int(self.rng.integers(0, hi + 1)), int(self.rng.integers(0, hi + 1))

    def words(self, pool, k: int) -> list[str]:
        k = min(k, len(pool))
        return [pool[i] for i in sorted(self.rng.choice(len(pool), size=k, replace=False))]

    def query_time(self) -> int:
        return self._clock + MINUTE_MS


def _calibration(spec: ScenarioSpec) -> tuple[Corpus, PageRankTable, QuerySpec, dict]:
    """Reputation-correlated judged population used only for training the forest."""
    rng = np.random.default_rng([spec.seed, 99])
    b = _Builder(rng, id_base=900_000)
    b.pagerank.scores["https://harborgazette.org/festival"] = 8.0
    b.pagerank.scores["https://cityharbor.gov/events"] = 9.0
    b.pagerank.scores["http://cheapfest.biz/deal"] = 0.5
    gold: dict[tuple[str, int], int] = {}
    tiers = ("celebrity", "high", "moderate", "low")
    p_relevant = {"celebrity": 0.95, "high": 0.9, "moderate": 0.6, "low": 0.05}
    for i in range(spec.calibration):
        tier = tiers[i % len(tiers)]
        uid = b.user(tier)
        words = b.words(CALIBRATION_POOL, 4)
        if tier in ("celebrity", "high"):
            urls = [["https://harborgazette.org/festival", "https://cityharbor.gov/events"][i % 2]]
            text = f"Harbor festival {' '.join(words)} {urls[0]}"
        elif tier == "moderate":
            urls = ["https://harborgazette.org/festival"] if i % 3 == 0 else []
            text = f"harbor festival {' '.join(words)}" + (f" {urls[0]}" if urls else "")
        else:
            urls = ["http://cheapfest.biz/deal"]
            text = f"harbor festival {' '.join(words)} !! :) {urls[0]}"
        fav, rts = b.engagement(tier)
        tid = b.tweet(uid, text, urls, fav, rts)
        relevant = rng.random() < p_relevant[tier]
        gold[("CAL", tid)] = 1 if relevant else (-1 if tier == "low" else 0)
    return b.corpus, b.pagerank, QuerySpec("CAL", "harbor festival", b.query_time()), gold


def _finish(spec, b: _Builder, query_text: str, qid: str, gold, groups, topology) -> Scenario:
    tc, tp, tq, tg = _calibration(spec)
    query = QuerySpec(qid, query_text, b.query_time())
    gold = {(qid, t): v for t, v in gold.items()}
    return Scenario(spec, b.corpus, b.pagerank, query, gold, groups, tc, tp, tq, tg, topology)


def gen_spam_bridge(spec: ScenarioSpec) -> Scenario:
    """A trusted cluster and a spam cluster joined only through bridge tweets.

    Bridge tweets quote part of the trusted content but carry the spam URL.
    """
    if spec.kind is not Kind.SpamBridge:
        raise ValueError("spec.kind must be SpamBridge")
    rng = np.random.default_rng([spec.seed, 1])
    b = _Builder(rng, id_base=1000)
    good_url = "https://ledgerdaily.org/politics/recount"
    spam_url = "http://prizeclaim.biz/win"
    b.pagerank.scores[good_url] = 8.0
    b.pagerank.scores[spam_url] = 0.0
    gold: dict[int, int] = {}
    groups: dict[str, list[int]] = {"trusted": [], "spam": [], "bridge": []}
    k = spec.words_per_tweet
    trusted_words: list[list[str]] = []
    for _ in range(spec.trusted):
        uid = b.user("high")
        fav, rts = b.engagement("high")
        words = b.words(TRUSTED_POOL, k)
        trusted_words.append(words)
        tid = b.tweet(uid, f"Election results: {' '.join(words)} {good_url}", [good_url], fav, rts)
        groups["trusted"].append(tid)
        gold[tid] = 1
    # Spam is near-duplicate and hashtag-heavy, so the spam cluster agrees strongly internally.
    for _ in range(spec.spam):
        uid = b.user("low")
        tags = " ".join("#" + w for w in b.words(SPAM_TAGS, len(SPAM_TAGS) - 1))
        tid = b.tweet(uid, f"election results {tags} {' '.join(b.words(SPAM_POOL, 2))} !! {spam_url}",
                      [spam_url])
        groups["spam"].append(tid)
        gold[tid] = -1
    for i in range(spec.bridges):
        uid = b.user("low")
        # Quote most of one trusted tweet, then append the spam payload.
        source = trusted_words[i % len(trusted_words)] if trusted_words else []
        quoted = source[: max(1, len(source) - 1)]
        tags = " ".join("#" + w for w in b.words(SPAM_TAGS, 2))
        tid = b.tweet(uid, f"election results {' '.join(quoted)} {tags} {spam_url}", [spam_url])
        groups["bridge"].append(tid)
        gold[tid] = -1
    topology = {"components_without_bridge": 2, "bridge_ids": groups["bridge"]}
    return _finish(spec, b, "election results", "SB01", gold, groups, topology)


def gen_hijacked(spec: ScenarioSpec) -> Scenario:
    """A hoax from a highly reputed account that nobody corroborates."""
    if spec.kind is not Kind.HijackedAccount:
        raise ValueError("spec.kind must be HijackedAccount")
    rng = np.random.default_rng([spec.seed, 2])
    b = _Builder(rng, id_base=2000)
    hoax_url = "https://wirenews.com/breaking/pentagon"
    b.pagerank.scores[hoax_url] = 9.0
    gold: dict[int, int] = {}
    groups: dict[str, list[int]] = {"hoax": [], "cluster": [], "chatter": []}
    k = spec.words_per_tweet
    uid = b.user("celebrity")
    tid = b.tweet(uid, f"Breaking news: {' '.join(HOAX_POOL[:k])} {hoax_url}", [hoax_url], 4000, 4000)
    groups["hoax"].append(tid)
    gold[tid] = -1
    for _ in range(spec.cluster):
        uid = b.user("moderate")
        fav, rts = b.engagement("moderate")
        tid = b.tweet(uid, f"breaking news {' '.join(b.words(NEWS_POOL, k))}", (), fav, rts)
        groups["cluster"].append(tid)
        gold[tid] = 1
    for i in range(spec.chatter):
        uid = b.user("low")
        words = CHATTER_POOL[i * 3 % len(CHATTER_POOL):][:3]
        tid = b.tweet(uid, f"breaking news {' '.join(words)} {i}", ())
        groups["chatter"].append(tid)
        gold[tid] = 0
    topology = {"isolated": groups["hoax"]}
    return _finish(spec, b, "breaking news", "HJ01", gold, groups, topology)


def gen_breaking_news(spec: ScenarioSpec) -> Scenario:
    """One large on-topic cluster and several small off-topic clusters sharing only the query."""
    if spec.kind is not Kind.BreakingNewsCluster:
        raise ValueError("spec.kind must be BreakingNewsCluster")
    if len(spec.off_topic) > len(OFFTOPIC_POOLS):
        raise ValueError(f"at most {len(OFFTOPIC_POOLS)} off-topic clusters")
    rng = np.random.default_rng([spec.seed, 3])
    b = _Builder(rng, id_base=3000)
    for u in NEWS_URLS:
        b.pagerank.scores[u] = 7.0
    gold: dict[int, int] = {}
    groups: dict[str, list[int]] = {"on_topic": []}
    k = spec.words_per_tweet
    for i in range(spec.on_topic):
        tier = "high" if i % 4 == 0 else "moderate"
        uid = b.user(tier)
        fav, rts = b.engagement(tier)
        tags = " ".join("#" + w for w in b.words(NEWS_TAGS, 2))
        urls = [NEWS_URLS[i % len(NEWS_URLS)]] if i % 2 == 0 else []
        text = f"japan news {' '.join(b.words(NEWS_POOL, k))} {tags}" + "".join(f" {u}" for u in urls)
        tid = b.tweet(uid, text, urls, fav, rts)
        groups["on_topic"].append(tid)
        gold[tid] = 1
    biggest = max(spec.off_topic, default=0)
    for c, size in enumerate(spec.off_topic):
        name = f"off_topic_{c}"
        groups[name] = []
        pool = OFFTOPIC_POOLS[c]
        # A clique larger than the story is the vote-stuffing case: low-reputation
        # near-duplicates. Ordinary off-topic chatter only loosely agrees.
        stuffing = size > spec.on_topic
        tier = "low" if stuffing else ("celebrity" if c == 0 else "high")
        for _ in range(size):
            uid = b.user(tier)
            fav, rts = b.engagement(tier)
            if stuffing:
                tags = " ".join("#" + w for w in b.words(STUFFING_TAGS, 3))
                text = f"Japan news {' '.join(b.words(STUFFING_POOL, 8))} {tags}"
            else:
                text = f"Japan news {' '.join(b.words(pool, 3))}"
            tid = b.tweet(uid, text, (), fav, rts)
            groups[name].append(tid)
            gold[tid] = 0
    topology = {"clusters": 1 + len(spec.off_topic), "largest_off_topic": biggest}
    return _finish(spec, b, "japan news", "BN01", gold, groups, topology)


GENERATORS = {
    Kind.SpamBridge: gen_spam_bridge,
    Kind.HijackedAccount: gen_hijacked,
    Kind.BreakingNewsCluster: gen_breaking_news,
}


def generate(spec: ScenarioSpec) -> Scenario:
    return GENERATORS[spec.kind](spec)
