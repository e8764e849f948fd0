"""Metadata extraction: transcript + context -> :class:`MetadataTuple`.

The extractors are deliberately simple, deterministic stand-ins for
heavier NLP models: a valence lexicon for sentiment, keyword hit counts
for topic, whitespace word counts for level of detail, and speaker tags
for the listener count.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Mapping, Optional

from sklearn.base import BaseEstimator, TransformerMixin

from ._validation import check_records
from .core import (
    NO_TOPIC,
    ConversationRecord,
    Detail,
    MetadataTuple,
    People,
    RelationshipClass,
    Sentiment,
)
from .exceptions import EmptyTranscript, InvariantViolation, ParseError
from .phrasematch import Phrasebook, detect_privacy_indication
from .text import tokenize

# word-count cut points for the detail bucket
DETAIL_SHORT_BELOW = 40
DETAIL_LONG_ABOVE = 120
# distinct-speaker cut points for the people bucket
PEOPLE_FEW_MAX = 2
PEOPLE_SOME_MAX = 4

MAGNITUDE_GATE = 0.05
SLIGHT = 0.05
STRONG = 0.25


# --------------------------------------------------------------------------
# resources
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class SentimentLexicon:
    entries: Mapping[str, float]

    def __post_init__(self):
        entries = {}
        for tok, val in dict(self.entries).items():
            if not tok or tok != tok.lower() or tokenize(tok) != [tok]:
                raise InvariantViolation("lexicon", f"token {tok!r} must be lowercase and punctuation-free")
            val = float(val)
            if not -1.0 <= val <= 1.0:
                raise InvariantViolation("lexicon", f"valence {val} for {tok!r} outside [-1, 1]")
            entries[tok] = val
        object.__setattr__(self, "entries", entries)

    __hash__ = None

    @classmethod
    def load(cls, path) -> "SentimentLexicon":
        return cls.from_tsv(Path(path).read_text(encoding="utf-8"), source=str(path))

    @classmethod
    def from_tsv(cls, text: str, source=None) -> "SentimentLexicon":
        entries = {}
        for lineno, line in enumerate(text.splitlines(), 1):
            if not line.strip() or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise ParseError("expected token<TAB>valence", line=lineno, path=source)
            try:
                entries[parts[0].strip()] = float(parts[1])
            except ValueError:
                raise ParseError(f"bad valence {parts[1]!r}", line=lineno, path=source) from None
        try:
            return cls(entries)
        except InvariantViolation as exc:
            raise ParseError(str(exc), path=source) from None

    @classmethod
    def default(cls) -> "SentimentLexicon":
        text = resources.files("cpmguard").joinpath("data/lexicon.tsv").read_text(encoding="utf-8")
        return cls.from_tsv(text, source="<bundled lexicon.tsv>")


@dataclass(frozen=True)
class TopicTaxonomy:
    labels: Mapping[str, frozenset]
    min_hits: int = 2

    def __post_init__(self):
        labels = {}
        for label, words in dict(self.labels).items():
            words = frozenset(w.lower() for w in words)
            if not label or label == NO_TOPIC:
                raise InvariantViolation("taxonomy", f"illegal label {label!r}")
            if not words:
                raise InvariantViolation("taxonomy", f"label {label!r} has no keywords")
            labels[label] = words
        if int(self.min_hits) < 1:
            raise InvariantViolation("min_hits", "must be a positive integer")
        object.__setattr__(self, "labels", labels)

    __hash__ = None

    @classmethod
    def load(cls, path) -> "TopicTaxonomy":
        return cls.from_json(Path(path).read_text(encoding="utf-8"), source=str(path))

    @classmethod
    def from_json(cls, text: str, source=None) -> "TopicTaxonomy":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(exc.msg, line=exc.lineno, path=source) from None
        if not isinstance(doc, dict):
            raise ParseError("taxonomy must be a JSON object", path=source)
        doc = dict(doc)
        min_hits = doc.pop("min_hits", 2)
        labels = doc.pop("labels", doc)
        if not isinstance(min_hits, int) or not all(isinstance(v, list) for v in labels.values()):
            raise ParseError("expected {label: [keywords...], min_hits: int}", path=source)
        try:
            return cls(labels, min_hits)
        except InvariantViolation as exc:
            raise ParseError(str(exc), path=source) from None

    @classmethod
    def default(cls) -> "TopicTaxonomy":
        text = resources.files("cpmguard").joinpath("data/taxonomy.json").read_text(encoding="utf-8")
        return cls.from_json(text, source="<bundled taxonomy.json>")


@dataclass(frozen=True)
class SentimentScore:
    score: float
    magnitude: float


# --------------------------------------------------------------------------
# individual extractors
# --------------------------------------------------------------------------


def analyze_sentiment(text: str, lexicon: SentimentLexicon) -> SentimentScore:
    """Mean valence of matched tokens, and mean |valence| over all tokens."""
    tokens = tokenize(text)
    hits = [lexicon.entries[t] for t in tokens if t in lexicon.entries]
    score = sum(hits) / max(1, len(hits))
    magnitude = sum(abs(v) for v in hits) / max(1, len(tokens))
    return SentimentScore(score, magnitude)


def quantize_sentiment(s: SentimentScore) -> Sentiment:
    if s.magnitude < MAGNITUDE_GATE:
        return Sentiment.NEUTRAL
    if s.score >= STRONG:
        return Sentiment.POSITIVE
    if s.score >= SLIGHT:
        return Sentiment.SLIGHTLY_POSITIVE
    if s.score > -SLIGHT:
        return Sentiment.NEUTRAL
    if s.score > -STRONG:
        return Sentiment.SLIGHTLY_NEGATIVE
    return Sentiment.NEGATIVE


def classify_topic(text: str, taxonomy: TopicTaxonomy) -> Optional[str]:
    """Label with the most keyword hits (>= ``min_hits``); ties go to the
    lexicographically smallest label."""
    tokens = tokenize(text)
    best, best_hits = None, 0
    for label in sorted(taxonomy.labels):
        words = taxonomy.labels[label]
        hits = sum(1 for t in tokens if t in words)
        if hits > best_hits:
            best, best_hits = label, hits
    return best if best_hits >= taxonomy.min_hits else None


def word_count(record: ConversationRecord) -> int:
    return sum(len(u.text.split()) for u in record.utterances)


def measure_detail(record: ConversationRecord) -> Detail:
    w = word_count(record)
    if w == 0:
        raise EmptyTranscript(f"conversation {record.id!r} has no words")
    if w < DETAIL_SHORT_BELOW:
        return Detail.SHORT
    if w <= DETAIL_LONG_ABOVE:
        return Detail.MEDIUM
    return Detail.LONG


def count_listeners(record: ConversationRecord) -> People:
    p = len(record.speakers)
    if p <= PEOPLE_FEW_MAX:
        return People.FEW
    if p <= PEOPLE_SOME_MAX:
        return People.SOME
    return People.MANY


def conversation_relationship(record: ConversationRecord,
                              fallback: Optional[RelationshipClass] = None) -> RelationshipClass:
    """Most intimate class over all participant pairs.

    ``fallback`` is used only when the context configures no relationships
    at all; unlisted pairs otherwise count as strangers.
    """
    ctx = record.context
    if not ctx.relationships and fallback is not None:
        return RelationshipClass(fallback)
    people = sorted(ctx.participants)
    best = RelationshipClass.STRANGER
    for i, a in enumerate(people):
        for b in people[i + 1:]:
            cls = ctx.relationship(a, b)
            if cls.intimacy > best.intimacy:
                best = cls
    return best


def extract_metadata(record: ConversationRecord, lexicon: SentimentLexicon, taxonomy: TopicTaxonomy,
                     phrasebook: Phrasebook,
                     querier_relationship: Optional[RelationshipClass] = None) -> MetadataTuple:
    detail = measure_detail(record)
    text = record.text
    return MetadataTuple(
        sentiment=quantize_sentiment(analyze_sentiment(text, lexicon)),
        topic=classify_topic(text, taxonomy),
        location=record.context.location,
        relationship=conversation_relationship(record, querier_relationship),
        detail=detail,
        people=count_listeners(record),
        privacy_phrase=detect_privacy_indication(record, phrasebook) is not None,
    )


# --------------------------------------------------------------------------
# estimator wrapper
# --------------------------------------------------------------------------


class MetadataExtractor(TransformerMixin, BaseEstimator):
    """Transform conversation records into metadata tuples.

    Parameters
    ----------
    lexicon, taxonomy, phrasebook : resource object, path, or None
        None selects the bundled default resource.
    phrase_threshold : float
        Similarity threshold used when the phrasebook is loaded from a path
        or from the bundled default.

    ``fit`` only resolves the resources; it learns nothing from ``X``.
    """

    def __init__(self, lexicon=None, taxonomy=None, phrasebook=None, phrase_threshold=0.7):
        self.lexicon = lexicon
        self.taxonomy = taxonomy
        self.phrasebook = phrasebook
        self.phrase_threshold = phrase_threshold

    def fit(self, X=None, y=None):
        self.lexicon_ = _resolve(self.lexicon, SentimentLexicon)
        self.taxonomy_ = _resolve(self.taxonomy, TopicTaxonomy)
        if isinstance(self.phrasebook, Phrasebook):
            self.phrasebook_ = self.phrasebook
        elif self.phrasebook is None:
            self.phrasebook_ = Phrasebook.default(self.phrase_threshold)
        else:
            self.phrasebook_ = Phrasebook.load(self.phrasebook, self.phrase_threshold)
        return self

    def transform(self, X):
        from sklearn.utils.validation import check_is_fitted

        check_is_fitted(self, "lexicon_")
        return [self.extract(r) for r in check_records(X)]

    def extract(self, record: ConversationRecord, querier_relationship=None) -> MetadataTuple:
        if not hasattr(self, "lexicon_"):
            self.fit()
        return extract_metadata(record, self.lexicon_, self.taxonomy_, self.phrasebook_,
                                querier_relationship)

    def __sklearn_tags__(self):
        tags = super().__sklearn_tags__()
        tags.requires_fit = False
        tags.input_tags.two_d_array = False
        return tags


def _resolve(value, cls):
    if isinstance(value, cls):
        return value
    if value is None:
        return cls.default()
    return cls.load(value)

