import pytest
from hypothesis import given, strategies as st

from raprop.agreement import AgreementGraph
from raprop.evaluation import (CSV_HEADER, average_precision, evaluate, judged_labels, ply_sweep,
                               precision_at_k)
from raprop.ranker import RankedList, Strategy, rank_fs

from test_ranker import _cset

GOLD = {("Q", 1): 1, ("Q", 3): 0, ("Q", 4): -1, ("Q", 5): 1}


def test_p_at_k_hand_example():
    ranked = [1, 2, 3, 4, 5]  # 2 is unjudged
    assert precision_at_k(ranked, GOLD, "Q", 3) == pytest.approx(1 / 3)
    assert precision_at_k(ranked, GOLD, "Q", 1) == 1.0
    assert precision_at_k(ranked, GOLD, "Q", 10) == pytest.approx(2 / 4)


def test_p_at_k_edges():
    assert precision_at_k([1, 5], GOLD, "Q", 2) == 1.0
    assert precision_at_k([7, 8], GOLD, "Q", 5) == 0.0
    with pytest.raises(ValueError):
        precision_at_k([1], GOLD, "Q", 0)


def test_ap_examples():
    gold = {("Q", 1): 1, ("Q", 2): 0, ("Q", 3): 1}
    assert average_precision([1, 2, 3], gold, "Q") == pytest.approx((1 + 2 / 3) / 2)
    assert average_precision([1, 3], gold, "Q") == 1.0
    assert average_precision([2], gold, "Q") == 0.0
    assert average_precision([1], {("Q", 1): 0}, "Q") == 0.0


def test_ap_denominator_counts_unretrieved():
    gold = {("Q", 1): 1, ("Q", 2): 1, ("Q", 3): 1}
    assert average_precision([1], gold, "Q") == pytest.approx(1 / 3)


def _run(q, ids, s=Strategy.FS):
    return RankedList(q, tuple((t, 1.0 / (i + 1)) for i, t in enumerate(ids)), s)


def test_evaluate_perfect_and_map():
    gold = {("A", i): 1 for i in range(40)}
    rep = evaluate([_run("A", range(40))], gold)
    assert rep.aggregate("FS").p(30) == 1.0
    gold2 = {("A", 1): 1, ("A", 2): 0, ("B", 1): 1, ("B", 2): 1}
    rep2 = evaluate([_run("A", [2, 1]), _run("B", [1, 2])], gold2)
    assert rep2.row("A", "FS").ap == pytest.approx(0.5)
    assert rep2.aggregate("FS").ap == pytest.approx(0.75)


def test_evaluate_row_counts_and_csv():
    gold = {("A", 1): 1, ("B", 2): 0}
    runs = [_run(q, [1, 2], s) for s in (Strategy.FS, Strategy.AG, Strategy.TS) for q in ("A", "B")]
    rep = evaluate(runs, gold)
    assert len(rep.rows) == 6 and len(rep.aggregates) == 3
    lines = rep.to_csv().splitlines()
    assert lines[0] == ",".join(CSV_HEADER)
    assert len(lines) == 1 + 9
    assert sum(1 for l in lines if l.startswith("ALL,")) == 3
    assert rep.to_csv() == evaluate(runs, gold).to_csv()


def test_query_absent_from_gold():
    rep = evaluate([_run("Z", [1, 2])], GOLD)
    assert rep.row("Z", "FS").judged == 0 and rep.row("Z", "FS").ap == 0.0


def test_ply_sweep_rows():
    cs = _cset({1: "a", 2: "b", 3: "c"})
    g = AgreementGraph([1, 2, 3])
    g.add_edge(2, 3, 3.0)
    fs = {1: 0.9, 2: 0.5, 3: 0.1}
    gold = {(cs.query.query_id, 1): 0, (cs.query.query_id, 2): 1, (cs.query.query_id, 3): 1}
    rep0 = ply_sweep(cs, fs, g, gold, 0)
    assert len(rep0.rows) == 1
    fs_row = evaluate([rank_fs(cs, fs)], gold).rows[0]
    assert rep0.rows[0].precision == fs_row.precision and rep0.rows[0].ap == fs_row.ap
    rep1 = ply_sweep(cs, fs, g, gold, 1)
    assert [r.plies for r in rep1.rows] == [0, 1]


# -- constructed lists for hand-enumerated oracles -------------------------------------------

def _oracle_p(labels_in_order, k):
    judged = [l for l in labels_in_order if l is not None][:k]
    return sum(1 for l in judged if l == 1) / len(judged) if judged else 0.0


def _oracle_ap(labels_in_order, total_relevant):
    judged = [l for l in labels_in_order if l is not None]
    hits, acc = 0, 0.0
    for r, l in enumerate(judged, 1):
        if l == 1:
            hits += 1
            acc += hits / r
    return acc / total_relevant if total_relevant else 0.0


_LABEL = st.sampled_from([None, -1, 0, 1])


@given(st.lists(_LABEL, max_size=40), st.integers(1, 35), st.integers(0, 3))
def test_metrics_match_oracle(labels, k, extra_relevant):
    gold = {("Q", i): l for i, l in enumerate(labels) if l is not None}
    for j in range(extra_relevant):
        gold[("Q", 1000 + j)] = 1
    ids = list(range(len(labels)))
    assert precision_at_k(ids, gold, "Q", k) == pytest.approx(_oracle_p(labels, k), abs=1e-15)
    total = sum(1 for v in gold.values() if v == 1)
    assert average_precision(ids, gold, "Q") == pytest.approx(_oracle_ap(labels, total), abs=1e-15)
    assert 0.0 <= precision_at_k(ids, gold, "Q", k) <= 1.0


@given(st.lists(_LABEL, max_size=30), st.lists(st.integers(0, 30), max_size=10), st.integers(1, 30))
def test_unjudged_invariance(labels, inserts, k):
    gold = {("Q", i): l for i, l in enumerate(labels) if l is not None}
    ids = list(range(len(labels)))
    noisy = list(ids)
    for n, pos in enumerate(inserts):
        noisy.insert(min(pos, len(noisy)), 5000 + n)
    assert precision_at_k(noisy, gold, "Q", k) == precision_at_k(ids, gold, "Q", k)
    assert average_precision(noisy, gold, "Q") == average_precision(ids, gold, "Q")


@given(st.lists(st.sampled_from([-1, 0, 1]), min_size=1, max_size=20), st.integers(1, 20), st.data())
def test_flipping_relevant_never_raises_precision(labels, k, data):
    gold = {("Q", i): l for i, l in enumerate(labels)}
    ones = [i for i, l in enumerate(labels) if l == 1]
    if not ones:
        return
    i = data.draw(st.sampled_from(ones))
    flipped = dict(gold)
    flipped[("Q", i)] = 0
    ids = list(range(len(labels)))
    assert precision_at_k(ids, flipped, "Q", k) <= precision_at_k(ids, gold, "Q", k)


def test_judged_labels_order():
    assert judged_labels([5, 2, 1], GOLD, "Q") == [1, 1]
