"""Random-forest regression of trust labels and per-set Feature Score normalization.

Trees are grown best-first on variance reduction until they reach the leaf
budget, which keeps the leaf bound exact rather than depth-derived.
"""

from __future__ import annotations

import heapq
import json
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

log = logging.getLogger(__name__)

MODEL_FORMAT_VERSION = 1
_SEED_MASK = (1 << 64) - 1
_MIN_GAIN = 1e-12


@dataclass(frozen=True)
class ForestParams:
    bag_size: int = 10
    max_leaves: int = 20
    trees: int = 100
    feature_subsample: float = 1.0 / 3.0
    seed: int = 0

    def __post_init__(self):
        if self.bag_size < 1 or self.max_leaves < 1 or self.trees < 1:
            raise ValueError("bag_size, max_leaves and trees must be positive")
        if not 0.0 < self.feature_subsample <= 1.0:
            raise ValueError("feature_subsample must lie in (0, 1]")


def relevance_target(label: int) -> float:
    """Training target for a gold label: only 1 counts as relevant."""
    return 1.0 if label == 1 else 0.0


def split_gold(gold: Mapping[tuple[str, int], int], seed: int, train_frac: float = 0.05,
               test_frac: float = 0.05):
    """Randomly partition judged pairs into (train, test, rest) dicts."""
    if not gold:
        raise ValueError("gold standard is empty")
    keys = sorted(gold)
    n = len(keys)
    rng = np.random.default_rng(seed & _SEED_MASK)
    order = rng.permutation(n)
    n_train = math.floor(n * train_frac)
    n_test = math.floor(n * test_frac)
    if n < 20:
        log.warning("only %d judged pairs; using minimal train/test splits", n)
        n_train = max(1, n_train)
        n_test = max(1 if n > 1 else 0, n_test)
    n_test = min(n_test, n - n_train)
    picked = [keys[i] for i in order]
    train = {k: gold[k] for k in picked[:n_train]}
    test = {k: gold[k] for k in picked[n_train:n_train + n_test]}
    rest = {k: gold[k] for k in picked[n_train + n_test:]}
    return train, test, rest


@dataclass
class RegressionTree:
    """Flat node arrays; ``feature[i] == -1`` marks a leaf."""

    feature: list[int] = field(default_factory=list)
    threshold: list[float] = field(default_factory=list)
    left: list[int] = field(default_factory=list)
    right: list[int] = field(default_factory=list)
    value: list[float] = field(default_factory=list)

    def _add(self, value: float) -> int:
        self.feature.append(-1)
        self.threshold.append(0.0)
        self.left.append(-1)
        self.right.append(-1)
        self.value.append(value)
        return len(self.value) - 1

    @property
    def n_leaves(self) -> int:
        return sum(1 for f in self.feature if f == -1)

    def predict_one(self, x: np.ndarray) -> float:
        node = 0
        while self.feature[node] != -1:
            node = self.left[node] if x[self.feature[node]] <= self.threshold[node] else self.right[node]
        return self.value[node]

    def predict(self, X: np.ndarray) -> np.ndarray:
        return np.array([self.predict_one(x) for x in X], dtype=np.float64)


def _best_split(X: np.ndarray, y: np.ndarray, idx: np.ndarray, features: np.ndarray):
    """Best (gain, feature, threshold) over ``features`` for samples ``idx``."""
    ys = y[idx]
    n = len(idx)
    total, total_sq = ys.sum(), np.square(ys).sum()
    parent_sse = total_sq - total * total / n
    best = (0.0, -1, 0.0)
    for f in features:
        xs = X[idx, f]
        order = np.argsort(xs, kind="stable")
        xs_sorted, ys_sorted = xs[order], ys[order]
        cum = np.cumsum(ys_sorted)[:-1]
        cum_sq = np.cumsum(np.square(ys_sorted))[:-1]
        n_left = np.arange(1, n)
        valid = xs_sorted[1:] > xs_sorted[:-1]
        if not valid.any():
            continue
        left_sse = cum_sq - cum * cum / n_left
        right_sum = total - cum
        right_sse = (total_sq - cum_sq) - right_sum * right_sum / (n - n_left)
        gain = np.where(valid, parent_sse - left_sse - right_sse, -np.inf)
        k = int(np.argmax(gain))
        if gain[k] > best[0] + _MIN_GAIN:
            thr = (xs_sorted[k] + xs_sorted[k + 1]) / 2.0
            best = (float(gain[k]), int(f), float(thr))
    return best


def fit_tree(X: np.ndarray, y: np.ndarray, sample_idx: np.ndarray, max_leaves: int,
             feature_subsample: float, rng: np.random.Generator) -> RegressionTree:
    n_features = X.shape[1]
    m = max(1, math.ceil(feature_subsample * n_features))
    tree = RegressionTree()
    root = tree._add(float(y[sample_idx].mean()))
    heap: list = []
    counter = 0

    def consider(node: int, idx: np.ndarray):
        nonlocal counter
        if len(idx) < 2:
            return
        feats = np.sort(rng.choice(n_features, size=m, replace=False))
        gain, f, thr = _best_split(X, y, idx, feats)
        if f >= 0:
            heapq.heappush(heap, (-gain, counter, node, idx, f, thr))
            counter += 1

    consider(root, sample_idx)
    leaves = 1
    while heap and leaves < max_leaves:
        _, _, node, idx, f, thr = heapq.heappop(heap)
        mask = X[idx, f] <= thr
        li, ri = idx[mask], idx[~mask]
        tree.feature[node] = f
        tree.threshold[node] = thr
        tree.left[node] = tree._add(float(y[li].mean()))
        tree.right[node] = tree._add(float(y[ri].mean()))
        leaves += 1
        consider(tree.left[node], li)
        consider(tree.right[node], ri)
    return tree


@dataclass
class RandomForestModel:
    trees: list[RegressionTree]
    params: ForestParams
    feature_names: tuple[str, ...]

    def predict(self, X) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        if not self.trees:
            return np.zeros(len(X))
        return np.mean([t.predict(X) for t in self.trees], axis=0)

    def to_json(self) -> str:
        doc = {
            "format": "raprop-forest",
            "version": MODEL_FORMAT_VERSION,
            "params": asdict(self.params),
            "feature_names": list(self.feature_names),
            "trees": [asdict(t) for t in self.trees],
        }
        return json.dumps(doc, sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_json(cls, raw: str) -> "RandomForestModel":
        doc = json.loads(raw)
        if doc.get("format") != "raprop-forest" or doc.get("version") != MODEL_FORMAT_VERSION:
            raise ValueError("unsupported model file")
        return cls([RegressionTree(**t) for t in doc["trees"]], ForestParams(**doc["params"]),
                   tuple(doc["feature_names"]))

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.to_json() + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "RandomForestModel":
        return cls.from_json(Path(path).read_text(encoding="utf-8"))


def train(X, y, params: ForestParams = ForestParams(), feature_names: Sequence[str] = (),
          jobs: int = 1) -> RandomForestModel:
    """Fit ``params.trees`` trees over ``params.bag_size`` bootstrap samples.

    Tree ``i`` is fit on bootstrap ``i % bag_size`` (each of ``len(y)`` draws
    with replacement); per-split feature sampling uses a generator seeded with
    ``seed ^ i``.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if X.ndim != 2 or len(X) != len(y):
        raise ValueError("X must be 2-D with one row per target")
    if len(y) < 2:
        raise ValueError("need at least 2 training samples")
    if not np.isfinite(X).all():
        raise ValueError("features must be finite; impute first")
    seed = params.seed & _SEED_MASK
    n = len(y)
    bags = [np.sort(np.random.default_rng([seed, b]).integers(0, n, size=n))
            for b in range(params.bag_size)]

    def fit(i: int) -> RegressionTree:
        rng = np.random.default_rng(seed ^ i)
        return fit_tree(X, y, bags[i % params.bag_size], params.max_leaves, params.feature_subsample, rng)

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            trees = list(pool.map(fit, range(params.trees)))
    else:
        trees = [fit(i) for i in range(params.trees)]
    names = tuple(feature_names) or tuple(f"f{i}" for i in range(X.shape[1]))
    return RandomForestModel(trees, params, names)


def predict(model: RandomForestModel, x) -> float | np.ndarray:
    out = model.predict(x)
    return float(out[0]) if np.ndim(x) == 1 else out


def normalize_scores(raw: Sequence[float]) -> list[float]:
    """Min-max scale to [0, 1]; a constant input maps to 0.5 throughout."""
    if len(raw) == 0:
        raise ValueError("no scores to normalize")
    lo, hi = min(raw), max(raw)
    if hi == lo:
        return [0.5] * len(raw)
    return [(s - lo) / (hi - lo) for s in raw]
