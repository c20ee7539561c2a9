import hashlib

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from raprop.learner import (ForestParams, RandomForestModel, RegressionTree, normalize_scores, predict,
                            relevance_target, split_gold, train)


def _gold(n):
    return {(f"Q{i % 3}", i): (i % 3) - 1 for i in range(n)}


def test_split_100():
    tr, te, rest = split_gold(_gold(100), seed=1)
    assert (len(tr), len(te), len(rest)) == (5, 5, 90)
    assert not set(tr) & set(te) and not (set(tr) | set(te)) & set(rest)


def test_split_deterministic():
    assert split_gold(_gold(100), 3) == split_gold(_gold(100), 3)
    assert split_gold(_gold(100), 3) != split_gold(_gold(100), 4)


def test_split_small_warns(caplog):
    with caplog.at_level("WARNING"):
        tr, te, rest = split_gold(_gold(10), seed=0)
    assert (len(tr), len(te), len(rest)) == (1, 1, 8)
    assert "10 judged" in caplog.text


def test_split_empty_rejected():
    with pytest.raises(ValueError):
        split_gold({}, 0)


@pytest.mark.parametrize("label,target", [(-1, 0.0), (0, 0.0), (1, 1.0)])
def test_relevance_target(label, target):
    assert relevance_target(label) == target


def _step_data(n=200, seed=0):
    rng = np.random.default_rng(seed)
    x = rng.uniform(-1, 1, size=(n, 1))
    return x, (x[:, 0] >= 0).astype(float)


def test_constant_target():
    X = np.random.default_rng(0).normal(size=(30, 3))
    model = train(X, np.ones(30), ForestParams(trees=5))
    assert np.all(model.predict(X) == 1.0)
    assert all(t.n_leaves == 1 for t in model.trees)


def test_step_function_beats_mean():
    X, y = _step_data()
    Xt, yt = _step_data(seed=1)
    model = train(X, y, ForestParams(trees=20, feature_subsample=1.0))
    mse = np.mean((model.predict(Xt) - yt) ** 2)
    base = np.mean((yt.mean() - yt) ** 2)
    assert mse < base
    assert base == pytest.approx(0.25, abs=0.01)


def test_leaf_bound():
    rng = np.random.default_rng(5)
    X = rng.normal(size=(300, 4))
    y = rng.random(300)
    model = train(X, y, ForestParams(trees=10, max_leaves=20))
    assert all(1 <= t.n_leaves <= 20 for t in model.trees)


def test_same_seed_bit_identical(tmp_path):
    X, y = _step_data(60)
    a = train(X, y, ForestParams(trees=8, seed=4))
    b = train(X, y, ForestParams(trees=8, seed=4), jobs=3)
    a.save(tmp_path / "a.json")
    b.save(tmp_path / "b.json")
    assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()
    back = RandomForestModel.load(tmp_path / "a.json")
    assert back.to_json() == a.to_json()
    np.testing.assert_array_equal(back.predict(X), a.predict(X))


def test_seed_changes_model():
    X, y = _step_data(60)
    h = [hashlib.sha256(train(X, y, ForestParams(trees=8, seed=s)).to_json().encode()).hexdigest()
         for s in (1, 2)]
    assert h[0] != h[1]


def test_single_leaf_and_averaging():
    leaf = RegressionTree([-1], [0.0], [-1], [-1], [0.7])
    m = RandomForestModel([leaf], ForestParams(), ("f0",))
    assert predict(m, np.array([3.0])) == 0.7
    two = RandomForestModel([RegressionTree([-1], [0.0], [-1], [-1], [0.2]),
                             RegressionTree([-1], [0.0], [-1], [-1], [0.6])], ForestParams(), ("f0",))
    assert predict(two, np.array([0.0])) == pytest.approx(0.4)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**32), st.integers(2, 40))
def test_predictions_within_label_range(seed, n):
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(n, 3))
    y = rng.integers(0, 2, size=n).astype(float)
    model = train(X, y, ForestParams(trees=4, seed=seed))
    p = model.predict(rng.normal(size=(10, 3)))
    assert np.all((p >= 0) & (p <= 1))


def test_train_rejects_bad_input():
    with pytest.raises(ValueError):
        train(np.zeros((1, 2)), np.zeros(1))
    with pytest.raises(ValueError):
        train(np.array([[np.nan], [1.0]]), np.zeros(2))
    with pytest.raises(ValueError):
        ForestParams(max_leaves=0)


def test_corrupt_model_rejected():
    with pytest.raises(ValueError):
        RandomForestModel.from_json('{"format": "other"}')


@pytest.mark.parametrize("raw,expected", [
    ([0.2, 0.6, 1.0], [0.0, 0.5, 1.0]),
    ([0.3, 0.3], [0.5, 0.5]),
    ([4.0], [0.5]),
])
def test_normalize(raw, expected):
    assert normalize_scores(raw) == pytest.approx(expected)


def test_normalize_empty():
    with pytest.raises(ValueError):
        normalize_scores([])
