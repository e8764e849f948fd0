import json
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from sklearn.base import clone
from sklearn.pipeline import Pipeline

from cpmguard.core import (
    ControlLevel,
    ControlTally,
    Detail,
    LocationClass,
    MetadataTuple,
    People,
    RelationshipClass,
    Rule,
    RuleSet,
    Sentiment,
    WeightVector,
)
from cpmguard.extractors import MetadataExtractor
from cpmguard.inference import RuleVotingClassifier, explain, predict, score_controls
from cpmguard.synthetic import planted_samples, random_tuple
from oracles import tally_oracle

H, M, L = ControlLevel.HIGH, ControlLevel.MODERATE, ControlLevel.LOW
NEG = ("sentiment", "Negative")
FAM = ("relationship", "Family")


def sample(**kw):
    base = dict(sentiment=Sentiment.NEGATIVE, topic=None, location=LocationClass.DOMESTIC,
                relationship=RelationshipClass.FAMILY, detail=Detail.SHORT, people=People.FEW,
                privacy_phrase=False)
    base.update(kw)
    return MetadataTuple(**base)


TWO_RULES = RuleSet((Rule({NEG}, H, 0.5, 1.0), Rule({NEG, FAM}, M, 0.3, 0.9)))


def test_empty_ruleset_tally():
    assert score_controls(sample(), RuleSet(())) == ControlTally(0, 0, 0)


def test_two_rule_hand_trace():
    assert score_controls(sample(), TWO_RULES) == ControlTally(low=0.0, moderate=1.0, high=1.0)
    assert predict(sample(), TWO_RULES) is H  # severity tie-break


def test_no_match_all_zero_is_fail_safe():
    s = sample(sentiment=Sentiment.POSITIVE, relationship=RelationshipClass.CLOSE)
    assert score_controls(s, TWO_RULES) == ControlTally()
    assert predict(s, TWO_RULES) is H


def test_argmax_low():
    rs = RuleSet((Rule({NEG}, L, 1, 1), Rule({FAM}, L, 1, 1), Rule({("detail", "Short")}, M, 1, 1),
                  Rule({("people", "Few")}, H, 1, 1)))
    assert score_controls(sample(), rs, "full") == ControlTally(2.0, 1.0, 1.0)
    assert predict(sample(), rs) is L


def test_privacy_phrase_override():
    rs = RuleSet((Rule({NEG}, L, 1, 1),))
    exp = explain(sample(privacy_phrase=True), rs)
    assert exp.predicted is H and exp.overridden
    assert exp.tally == ControlTally(1.0, 0, 0)  # still reported


def test_partial_mode_literal_reading():
    rs = RuleSet((Rule({NEG, ("topic", "Health")}, L, 1, 1),))
    w = WeightVector({"sentiment": 3.0, "topic": 1.0})
    rs = RuleSet(rs.rules, w)
    assert score_controls(sample(), rs, "full") == ControlTally()
    assert score_controls(sample(), rs, "partial") == ControlTally(low=3.0)


def test_weighted_average_of_matched_items():
    rs = RuleSet((Rule({NEG, FAM}, M, 1, 1),), WeightVector({"sentiment": 2.0, "relationship": 0.5}))
    assert score_controls(sample(), rs).moderate == pytest.approx(1.25)


def test_bad_match_mode():
    with pytest.raises(ValueError):
        score_controls(sample(), TWO_RULES, "fuzzy")


def test_explain_entries():
    exp = explain(sample(), TWO_RULES)
    assert [e.contribution for e in exp.entries] == [1.0, 1.0]
    assert exp.predicted is H and not exp.overridden
    empty = explain(sample(), RuleSet(()))
    assert empty.entries == () and empty.predicted is H and not empty.overridden
    json.dumps(exp.to_dict())


def _random_ruleset(rng, n_rules=30, weights=None):
    rules = {}
    for _ in range(n_rules):
        t = random_tuple(rng)
        items = sorted(t.items())
        ant = frozenset(rng.sample(items, rng.randint(1, 3)))
        rules[ant] = Rule(ant, rng.choice(list(ControlLevel)), rng.random(), rng.random())
    return RuleSet(tuple(rules.values()), weights or WeightVector())


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10 ** 6), st.sampled_from(["full", "partial"]))
def test_tally_matches_literal_loop(seed, mode):
    rng = random.Random(seed)
    w = WeightVector({a: rng.uniform(0, 3) for a in ("sentiment", "topic", "location", "relationship")})
    rs = _random_ruleset(rng, weights=w)
    s = random_tuple(rng)
    want = tally_oracle(s.items(), rs.rules, w, partial=(mode == "partial"))
    got = score_controls(s, rs, mode)
    for lvl in ControlLevel:
        assert got[lvl] == pytest.approx(want[lvl], abs=1e-12)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_explanation_consistency(seed):
    rng = random.Random(seed)
    rs = _random_ruleset(rng)
    s = random_tuple(rng)
    exp = explain(s, rs)
    assert exp.tally == score_controls(s, rs)
    assert exp.predicted is predict(s, rs)
    for lvl in ControlLevel:
        total = sum(e.contribution for e in exp.entries if e.rule.consequent is lvl)
        assert total == pytest.approx(exp.tally[lvl], abs=1e-12)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_zero_weight_rule_is_neutral(seed):
    rng = random.Random(seed)
    rs = _random_ruleset(rng, weights=WeightVector({"people": 0.0}))
    s = random_tuple(rng)
    extra = Rule({("people", s.value_of("people"))}, rng.choice(list(ControlLevel)), 0.1, 1.0)
    if any(r.antecedent == extra.antecedent for r in rs.rules):
        return
    bigger = RuleSet(rs.rules + (extra,), rs.weights)
    assert predict(s, bigger) is predict(s, rs)


def test_subset_index_path_agrees_with_scan():
    rng = random.Random(2)
    rs = _random_ruleset(rng, n_rules=400)
    assert len(rs) > 128  # forces the subset-enumeration path
    for _ in range(50):
        s = random_tuple(rng)
        want = tally_oracle(s.items(), rs.rules, rs.weights)
        got = score_controls(s, rs)
        assert got.as_dict() == pytest.approx({lvl.label: v for lvl, v in want.items()})


# -- estimator -----------------------------------------------------------------

def test_classifier_fit_predict():
    X, y, y_true = planted_samples(120, seed=4, noise=0.0)
    clf = RuleVotingClassifier(n_supports=3).fit(X, y)
    assert clf.score(X, y) == 1.0
    pred = clf.predict(X[:5])
    assert isinstance(pred, np.ndarray) and all(isinstance(p, ControlLevel) for p in pred)
    assert clf.decision_function(X[:5]).shape == (5, 3)


def test_classifier_params_and_clone():
    clf = RuleVotingClassifier(n_supports=4, weights={"topic": 2.0}, match_mode="partial")
    assert clf.get_params()["n_supports"] == 4
    twin = clone(clf)
    assert twin.get_params() == clf.get_params()
    twin.set_params(n_supports=1)
    assert clf.n_supports == 4


def test_classifier_accepts_label_names():
    X, y, _ = planted_samples(40, seed=1, noise=0.0)
    clf = RuleVotingClassifier().fit(X, [lvl.label for lvl in y])
    assert set(clf.predict(X)) <= set(ControlLevel)


def test_classifier_rejects_bad_input():
    from sklearn.exceptions import NotFittedError

    with pytest.raises(NotFittedError):
        RuleVotingClassifier().predict([sample()])
    with pytest.raises(TypeError):
        RuleVotingClassifier().fit([[1, 2, 3]], [H])
    with pytest.raises(ValueError):
        RuleVotingClassifier().fit([sample()], [H, L])


def test_from_ruleset_roundtrip():
    X, y, _ = planted_samples(60, seed=8, noise=0.0)
    clf = RuleVotingClassifier(n_supports=2).fit(X, y)
    again = RuleVotingClassifier.from_ruleset(clf.ruleset_)
    assert list(again.predict(X)) == list(clf.predict(X))
    assert again.n_supports == 2


def test_pipeline_records_to_levels(control6_record, secret_record):
    pipe = Pipeline([("extract", MetadataExtractor()), ("vote", RuleVotingClassifier())])
    pipe.fit([control6_record, secret_record], [M, H])
    assert list(pipe.predict([control6_record, secret_record])) == [M, H]


def test_formal_tie_survives_weight_scaling():
    # {a}+{b}+{c} equals the three pair averages for any weights
    sample = MetadataTuple(Sentiment.NEUTRAL, "Travel", LocationClass.DOMESTIC, RelationshipClass.CLOSE,
                           Detail.SHORT, People.FEW, False)
    a, b, c = ("sentiment", "Neutral"), ("topic", "Travel"), ("location", "Domestic")
    items = sample.items()
    assert {a, b, c} <= items
    rules = [Rule({x}, ControlLevel.HIGH, 0.5, 0.6) for x in (a, b, c)]
    rules += [Rule(set(p), ControlLevel.MODERATE, 0.5, 0.6) for p in ((a, b), (a, c), (b, c))]
    w = WeightVector({"sentiment": 0.1, "topic": 0.2, "location": 0.7})
    for scale in (1, 0.1, 3, 17):
        rs = RuleSet(rules, w.scaled(scale))
        tally = score_controls(sample, rs)
        assert tally.high == pytest.approx(tally.moderate)
        assert predict(sample, rs) == ControlLevel.HIGH
