import math

import pytest
from hypothesis import given, settings, strategies as st

from raprop.agreement import IdfStats, idf_stats
from raprop.candidate import (NOUN_BOOST, Model, TokenCache, build_candidates, expand_query,
                              filter_retweets_replies, mediator_candidates, min_term_filter,
                              noun_boosted_tfidf, nonmediator_candidates)
from raprop.text import NOUN_CLASSES, PosClass, query_stems, tokenize_tweet

from conftest import T0, corpus_of, query, rec


def test_mediator_no_matches_is_empty():
    c = corpus_of(rec(1, "cats sleep on warm sofas"))
    cs = mediator_candidates(c, query("japan quake"))
    assert len(cs) == 0 and cs.ids == []


def test_mediator_most_recent_n():
    c = corpus_of(*[rec(i, f"japan quake report number {i}", ts=T0 + i * 10) for i in range(1, 6)])
    cs = mediator_candidates(c, query("japan"), n=3)
    assert cs.ids == [5, 4, 3]


def test_mediator_excludes_future_tweets():
    c = corpus_of(rec(1, "japan quake rescue teams arrive", ts=T0), rec(2, "japan quake aftershock hits hard", ts=T0 + 50))
    cs = mediator_candidates(c, query("japan", time=T0 + 10))
    assert cs.ids == [1]


def test_mediator_filters_retweets_and_short():
    c = corpus_of(rec(1, "japan quake rescue teams", is_retweet=True), rec(2, "japan quake now"),
                  rec(3, "japan quake rescue teams arrive"), rec(4, "japan quake rescue ok", is_reply=True))
    assert mediator_candidates(c, query("japan")).ids == [3]


def test_mediator_sorted_by_recency_and_invariants():
    recs = [rec(i, f"japan quake rescue update {i % 4}", ts=T0 + (i * 7919) % 97) for i in range(1, 30)]
    cs = mediator_candidates(corpus_of(*recs), query("japan quake"), n=20)
    ts = [cs.records[t].timestamp for t in cs.ids]
    assert ts == sorted(ts, reverse=True)
    for tw in cs.tweets:
        r = cs.records[tw.tweet_id]
        assert not r.is_retweet and not r.is_reply and tw.term_count() >= 4
        assert {t.stem for t in tw.terms} & set(cs.original_stems)


def test_url_text_matches_keyword():
    c = corpus_of(rec(1, "read this long report now http://news.org/japan", urls=("http://news.org/japan",)))
    assert mediator_candidates(c, query("japan")).ids == [1]


def test_nonmediator_noun_beats_verb():
    # "cuts" is a lexicon verb in one tweet and a mid-sentence proper noun in the other
    c = corpus_of(rec(1, "budget cuts hurt local schools"), rec(2, "we love Cuts band tonight"),
                  rec(3, "sunny weather all week long"))
    q = query("cuts")
    cs = nonmediator_candidates(c, q, n=1)
    toks = {t: tokenize_tweet(t, c.tweets[t].text) for t in (1, 2)}
    pos = {t: next(x.pos for x in toks[t].tokens if x.stem == "cut") for t in (1, 2)}
    assert pos[2] in NOUN_CLASSES and pos[1] not in NOUN_CLASSES
    assert cs.ids == [2]


def test_noun_boost_factor():
    tw = tokenize_tweet(1, "big fire near town")
    idf = IdfStats(10, {"fire": 2})
    assert noun_boosted_tfidf(tw, ["fire"], idf) == pytest.approx(NOUN_BOOST * math.log(5))
    assert noun_boosted_tfidf(tw, ["fire"], idf, boost=1.0) == pytest.approx(math.log(5))


def test_nonmediator_single_candidate():
    c = corpus_of(rec(1, "japan is a country far away"))
    assert nonmediator_candidates(c, query("japan")).ids == [1]


def test_nonmediator_tie_earlier_id_first():
    c = corpus_of(rec(9, "japan news update here today"), rec(4, "japan news update here today", ts=T0))
    assert nonmediator_candidates(c, query("japan"), n=2).ids == [4, 9]


def test_mediator_vs_nonmediator_differ():
    recs = [rec(i, f"japan gossip item number {i} lol", ts=T0 + 100 + i) for i in range(1, 4)]
    recs.append(rec(50, "Japan tsunami japan coast japan warning", ts=T0))
    recs += [rec(60 + i, f"sunny weather forecast for week {i}") for i in range(3)]
    c = corpus_of(*recs)
    q = query("japan")
    assert mediator_candidates(c, q, n=2).ids != nonmediator_candidates(c, q, n=2).ids
    assert 50 in nonmediator_candidates(c, q, n=2).ids


def test_filter_retweets_replies_counts():
    rs = [rec(i, "x", is_retweet=i in (1, 3)) for i in range(5)]
    assert filter_retweets_replies([rec(1, "x", is_retweet=True)]) == []
    plain = [rec(i, "x") for i in range(3)]
    assert filter_retweets_replies(plain) == plain
    assert len(filter_retweets_replies(rs)) == 3


@pytest.mark.parametrize("text,kept", [
    ("one two three", False),
    ("one two three four", True),
    ("", False),
    ("one , two ! three", False),
])
def test_min_term_filter(text, kept):
    tw = tokenize_tweet(1, text)
    assert (min_term_filter([tw]) == [tw]) is kept


def test_expand_no_nouns_unchanged():
    q = query("japan")
    tws = [tokenize_tweet(1, "japan is very quickly there")]
    assert all(t.pos not in NOUN_CLASSES for t in tws[0].tokens if t.stem != "japan")
    assert expand_query(q, tws) == q


def test_expand_few_nouns_all_appended():
    q = query("japan")
    tws = [tokenize_tweet(1, "japan tsunami reactor"), tokenize_tweet(2, "japan quake")]
    out = expand_query(q, tws)
    assert out.text.startswith("japan ")
    assert set(query_stems(out.text)) == {"japan", "tsunami", "reactor", "quak"}


def test_expand_top_five_brute_force():
    texts = [
        "japan tsunami reactor tsunami",
        "japan reactor shelter",
        "japan tsunami volunteers",
        "japan shelter convoy",
        "japan ferry airport",
        "japan tsunami reactor",
    ]
    tws = [tokenize_tweet(i, t) for i, t in enumerate(texts)]
    out = expand_query(query("japan"), tws)
    # brute-force oracle: summed TF over nouns times ln(n / df)
    n = len(texts)
    tf, df = {}, {}
    for t in tws:
        seen = set()
        for tok in t.tokens:
            if tok.stem == "japan":
                continue
            if tok.pos in NOUN_CLASSES:
                tf[tok.stem] = tf.get(tok.stem, 0) + 1
            seen.add(tok.stem)
        for s in seen:
            df[s] = df.get(s, 0) + 1
    score = {s: tf[s] * math.log(n / df[s]) for s in tf}
    best = sorted(score, key=lambda s: (-score[s], s))[:5]
    assert len(score) == 7
    assert query_stems(out.text)[1:] == best


@settings(max_examples=50, deadline=None)
@given(st.lists(st.lists(st.sampled_from(["japan", "quake", "tsunami", "reactor", "Tokyo", "runs",
                                          "quickly", "the", "ferry", "news"]), min_size=1, max_size=8),
                max_size=8),
       st.sampled_from(["japan", "japan news", "quake tokyo"]))
def test_expand_keeps_original_terms(docs, qtext):
    tws = [tokenize_tweet(i, " ".join(d)) for i, d in enumerate(docs)]
    q = query(qtext)
    out = expand_query(q, tws)
    orig = query_stems(qtext)
    new = query_stems(out.text)
    assert new[:len(orig)] == orig
    assert len(new) <= len(orig) + 5


def test_build_candidates_dispatch():
    c = corpus_of(rec(1, "japan quake rescue teams arrive"))
    assert build_candidates(c, query("japan"), "nonmediator").model is Model.NonMediator
    assert build_candidates(c, query("japan"), cache=TokenCache(c)).model is Model.Mediator
    with pytest.raises(ValueError):
        build_candidates(c, query("japan"), n=0)


def test_candidate_idf_over_set():
    c = corpus_of(rec(1, "japan quake rescue teams"), rec(2, "japan quake rescue dogs"))
    cs = mediator_candidates(c, query("japan"))
    assert cs.idf["dog"] == pytest.approx(math.log(2))
    assert cs.idf["quak"] == 0.0
    assert cs.idf.as_dict() == idf_stats(cs.tweets).as_dict()
