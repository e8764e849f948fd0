import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from cpmguard.core import ContextInfo, ConversationRecord
from cpmguard.exceptions import InvariantViolation, ParseError
from cpmguard.phrasematch import Phrasebook, PhraseMatch, detect_privacy_indication, similarity
from cpmguard.text import tokenize

words = st.sampled_from(["don't", "tell", "anyone", "this", "please", "keep", "secret", "us", "the"])
texts = st.lists(words, max_size=6).map(" ".join)


def test_tokenize():
    assert tokenize("Don't tell ANYONE this!") == ["don't", "tell", "anyone", "this"]
    assert tokenize("  -- ... ") == []


def test_similarity_spot_values():
    assert similarity("keep this between us", "keep this between us") == 1.0
    assert similarity("good morning", "tell anyone") == 0.0
    # 3 shared tokens over sqrt(4 * 4)
    assert similarity("don't tell anyone this", "please don't tell anyone") == pytest.approx(0.75, abs=1e-12)
    assert similarity("", "") == 0.0


@given(texts, texts)
def test_similarity_properties(a, b):
    s = similarity(a, b)
    assert s == similarity(b, a)
    assert 0.0 <= s <= 1.0 + 1e-12
    ta, tb = set(tokenize(a)), set(tokenize(b))
    if ta and ta == tb:
        assert s == pytest.approx(1.0)
    if math.isclose(s, 1.0):
        assert ta == tb and ta


def _rec(*texts):
    return ConversationRecord("r", [("a", t) for t in texts], ContextInfo({"a"}))


def test_detect_exact_phrase():
    book = Phrasebook(("don't tell anyone this",))
    m = detect_privacy_indication(_rec("hello", "Don't tell anyone this"), book)
    assert m == PhraseMatch(1, "don't tell anyone this", 1.0)


def test_detect_paraphrase_at_threshold():
    book = Phrasebook(("don't tell anyone this",), threshold=0.7)
    m = detect_privacy_indication(_rec("please don't tell anyone"), book)
    assert m.similarity == pytest.approx(0.75)


def test_no_match():
    book = Phrasebook(("don't tell anyone this",))
    assert detect_privacy_indication(_rec("the weather is lovely"), book) is None


def test_ties_prefer_earliest_utterance_then_phrase():
    book = Phrasebook(("keep it quiet", "keep it secret"), threshold=0.5)
    m = detect_privacy_indication(_rec("nothing", "keep it", "keep it"), book)
    assert (m.utterance_index, m.phrase) == (1, "keep it quiet")


@given(st.lists(texts, min_size=1, max_size=4), st.lists(texts.filter(lambda t: tokenize(t)), min_size=1,
                                                         max_size=3), st.floats(0.05, 1.0))
def test_detect_matches_exhaustive_scan(utts, phrases, threshold):
    book = Phrasebook(tuple(phrases), threshold)
    best = max(similarity(u, p) for u in utts for p in book.phrases)
    m = detect_privacy_indication(_rec(*utts), book)
    assert (m is not None) == (best >= threshold)
    if m is not None:
        assert m.similarity == best


def test_phrasebook_file(tmp_path):
    p = tmp_path / "book.txt"
    p.write_text("# header\n\nkeep this between us\n  don't tell anyone  \n", encoding="utf-8")
    book = Phrasebook.load(p)
    assert book.phrases == ("keep this between us", "don't tell anyone")
    p.write_text("# only comments\n", encoding="utf-8")
    with pytest.raises(ParseError):
        Phrasebook.load(p)


def test_phrasebook_validation():
    with pytest.raises(InvariantViolation):
        Phrasebook(("x",), threshold=0.0)
    with pytest.raises(InvariantViolation):
        Phrasebook(("  ",))


def test_default_phrasebook_contains_reference_phrases():
    book = Phrasebook.default()
    assert "don't tell anyone this" in book.phrases
    assert "make sure no one knows what we talked about" in book.phrases
