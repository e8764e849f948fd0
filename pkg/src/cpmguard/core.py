"""Domain types shared by every module.

Everything here is an immutable value.  Enumerations carry their wire
spelling as ``value`` so that serializers can use ``Enum(value)`` directly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum, IntEnum
from functools import cached_property
from typing import Iterable, Iterator, Mapping, Optional

from .exceptions import InvariantViolation

__all__ = [
    "ATTRIBUTES",
    "LABEL_ATTRIBUTE",
    "ControlLevel",
    "Sentiment",
    "LocationClass",
    "RelationshipClass",
    "Detail",
    "People",
    "PrivacyViolation",
    "Utterance",
    "ContextInfo",
    "ConversationRecord",
    "MetadataTuple",
    "Rule",
    "RuleSet",
    "WeightVector",
    "ControlTally",
    "format_item",
    "parse_item",
]


class ControlLevel(IntEnum):
    """Disclosure strictness.  Integer order is severity order."""

    LOW = 0
    MODERATE = 1
    HIGH = 2

    @property
    def label(self) -> str:
        return self.name.lower()

    @classmethod
    def parse(cls, text: str) -> "ControlLevel":
        try:
            return cls[str(text).strip().upper()]
        except KeyError:
            raise ValueError(f"unknown control level {text!r}") from None

    def __str__(self) -> str:
        return self.label


class Sentiment(Enum):
    NEGATIVE = "Negative"
    SLIGHTLY_NEGATIVE = "SlightlyNegative"
    NEUTRAL = "Neutral"
    SLIGHTLY_POSITIVE = "SlightlyPositive"
    POSITIVE = "Positive"


class LocationClass(Enum):
    DOMESTIC = "Domestic"
    NON_DOMESTIC = "NonDomestic"


class RelationshipClass(Enum):
    FAMILY = "Family"
    CLOSE = "Close"
    PROFESSIONAL = "Professional"
    ACQUAINTANCE = "Acquaintance"
    STRANGER = "Stranger"

    @property
    def intimacy(self) -> int:
        """Higher is more intimate (Family highest, Stranger lowest)."""
        return len(_INTIMACY) - _INTIMACY.index(self)


_INTIMACY = list(RelationshipClass)


class Detail(Enum):
    SHORT = "Short"
    MEDIUM = "Medium"
    LONG = "Long"


class People(Enum):
    FEW = "Few"
    SOME = "Some"
    MANY = "Many"


class PrivacyViolation(Enum):
    """Scenario annotation vocabulary; never used for inference."""

    PV1 = "PV1"  # miscalculation in timing
    PV2 = "PV2"  # violation for the greater good
    PV3 = "PV3"  # physical boundary predicaments
    PV4 = "PV4"  # errors in judgement
    PV5 = "PV5"  # value judgements
    PV6 = "PV6"  # rules and responsibilities
    PV7 = "PV7"  # eavesdropping


# --------------------------------------------------------------------------
# conversations
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Utterance:
    speaker: str
    text: str


def _pair(a: str, b: str) -> frozenset:
    return frozenset((a, b))


@dataclass(frozen=True, eq=True)
class ContextInfo:
    """Configuration-supplied context of one conversation.

    ``relationships`` maps an unordered speaker pair (a two-element
    frozenset) to its class.  Pairs that are not listed are strangers.
    """

    participants: frozenset
    relationships: Mapping[frozenset, RelationshipClass] = field(default_factory=dict)
    location: LocationClass = LocationClass.DOMESTIC
    pv_type: Optional[PrivacyViolation] = None

    def __post_init__(self):
        object.__setattr__(self, "participants", frozenset(self.participants))
        rels = {}
        for pair, cls in dict(self.relationships).items():
            pair = frozenset(pair)
            if len(pair) != 2:
                raise InvariantViolation("relationships", f"pair {sorted(pair)} must name two distinct speakers")
            unknown = pair - self.participants
            if unknown:
                raise InvariantViolation("relationships", f"unknown participant(s) {sorted(unknown)}")
            rels[pair] = RelationshipClass(cls)
        object.__setattr__(self, "relationships", rels)

    __hash__ = None  # relationships is a dict

    def relationship(self, a: str, b: str) -> RelationshipClass:
        return self.relationships.get(_pair(a, b), RelationshipClass.STRANGER)


@dataclass(frozen=True)
class ConversationRecord:
    id: str
    utterances: tuple
    context: ContextInfo
    timestamp: Optional[int] = None

    def __post_init__(self):
        utts = tuple(u if isinstance(u, Utterance) else Utterance(*u) for u in self.utterances)
        object.__setattr__(self, "utterances", utts)
        if not utts:
            raise InvariantViolation("utterances", "must be non-empty", self.id)
        for u in utts:
            if not u.speaker:
                raise InvariantViolation("utterances", "speaker id must be non-empty", self.id)
            if u.speaker not in self.context.participants:
                raise InvariantViolation(
                    "utterances", f"speaker {u.speaker!r} is not a participant", self.id
                )

    __hash__ = None

    @property
    def text(self) -> str:
        """All utterances joined with single spaces."""
        return " ".join(u.text for u in self.utterances)

    @property
    def speakers(self) -> frozenset:
        return frozenset(u.speaker for u in self.utterances)


# --------------------------------------------------------------------------
# metadata tuples and rules
# --------------------------------------------------------------------------

ATTRIBUTES = (
    "sentiment",
    "topic",
    "location",
    "relationship",
    "detail",
    "people",
    "privacy_phrase",
)

LABEL_ATTRIBUTE = "control"
NO_TOPIC = "None"


def format_item(item) -> str:
    attr, value = item
    return f"{attr}={value}"


def parse_item(text: str) -> tuple:
    attr, sep, value = text.partition("=")
    if not sep or not attr:
        raise ValueError(f"item {text!r} is not of the form attr=value")
    return (attr, value)


@dataclass(frozen=True)
class MetadataTuple:
    sentiment: Sentiment
    topic: Optional[str]
    location: LocationClass
    relationship: RelationshipClass
    detail: Detail
    people: People
    privacy_phrase: bool

    def __post_init__(self):
        object.__setattr__(self, "sentiment", Sentiment(self.sentiment))
        object.__setattr__(self, "location", LocationClass(self.location))
        object.__setattr__(self, "relationship", RelationshipClass(self.relationship))
        object.__setattr__(self, "detail", Detail(self.detail))
        object.__setattr__(self, "people", People(self.people))
        if self.topic == NO_TOPIC:
            object.__setattr__(self, "topic", None)
        if not isinstance(self.privacy_phrase, bool):
            raise InvariantViolation("privacy_phrase", "must be a boolean")

    def value_of(self, attribute: str) -> str:
        """Item value spelling used in transactions and rules."""
        v = getattr(self, attribute)
        if attribute == "topic":
            return NO_TOPIC if v is None else v
        if attribute == "privacy_phrase":
            return "true" if v else "false"
        return v.value

    def items(self) -> frozenset:
        return frozenset((a, self.value_of(a)) for a in ATTRIBUTES)

    def to_dict(self) -> dict:
        return {a: (getattr(self, a) if a in ("topic", "privacy_phrase") else self.value_of(a))
                for a in ATTRIBUTES}

    @classmethod
    def from_dict(cls, d: Mapping) -> "MetadataTuple":
        missing = [a for a in ATTRIBUTES if a not in d]
        if missing:
            raise InvariantViolation("metadata", f"missing attribute(s) {missing}")
        return cls(**{a: d[a] for a in ATTRIBUTES})


@dataclass(frozen=True)
class Rule:
    """``antecedent`` -> ``consequent`` with its corpus support/confidence."""

    antecedent: frozenset
    consequent: ControlLevel
    support: float
    confidence: float

    def __post_init__(self):
        ant = frozenset(tuple(i) for i in self.antecedent)
        object.__setattr__(self, "antecedent", ant)
        object.__setattr__(self, "consequent", ControlLevel(self.consequent))
        if not ant:
            raise InvariantViolation("antecedent", "must be non-empty")
        attrs = [a for a, _ in ant]
        if len(set(attrs)) != len(attrs):
            raise InvariantViolation("antecedent", "an attribute appears twice")
        if LABEL_ATTRIBUTE in attrs:
            raise InvariantViolation("antecedent", "control level cannot be an antecedent item")
        for name in ("support", "confidence"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise InvariantViolation(name, f"{v} not in [0, 1]")

    @property
    def key(self) -> tuple:
        """Canonical ordering key: antecedent size, then lexicographic."""
        return (len(self.antecedent), sorted(format_item(i) for i in self.antecedent),
                int(self.consequent))


class WeightVector(Mapping):
    """Per-attribute vote weights; attributes not given default to 1.0."""

    def __init__(self, weights: Optional[Mapping[str, float]] = None):
        w = {a: 1.0 for a in ATTRIBUTES}
        for k, v in dict(weights or {}).items():
            v = float(v)
            if not math.isfinite(v) or v < 0:
                raise InvariantViolation("weights", f"weight for {k!r} must be finite and >= 0, got {v}")
            w[k] = v
        if not any(v > 0 for v in w.values()):
            raise InvariantViolation("weights", "at least one weight must be positive")
        self._w = w

    def __getitem__(self, attribute):
        return self._w.get(attribute, 1.0)

    def __iter__(self) -> Iterator[str]:
        return iter(self._w)

    def __len__(self) -> int:
        return len(self._w)

    def __eq__(self, other):
        if isinstance(other, WeightVector):
            return self._w == other._w
        return NotImplemented

    def __hash__(self):
        return hash(tuple(sorted(self._w.items())))

    def __repr__(self):
        return f"WeightVector({self._w!r})"

    def scaled(self, factor: float) -> "WeightVector":
        return WeightVector({k: v * factor for k, v in self._w.items()})


@dataclass(frozen=True)
class RuleSet:
    rules: tuple
    weights: WeightVector = field(default_factory=WeightVector)
    version: int = 1
    provenance: Mapping = field(default_factory=dict)

    def __post_init__(self):
        rules = tuple(sorted(self.rules, key=lambda r: r.key))
        seen = set()
        for r in rules:
            k = (r.antecedent, r.consequent)
            if k in seen:
                raise InvariantViolation("rules", f"duplicate rule {sorted(r.antecedent)} -> {r.consequent}")
            seen.add(k)
        object.__setattr__(self, "rules", rules)
        if not isinstance(self.weights, WeightVector):
            object.__setattr__(self, "weights", WeightVector(self.weights))
        if int(self.version) < 1:
            raise InvariantViolation("version", "must be >= 1")
        object.__setattr__(self, "provenance", dict(self.provenance))

    __hash__ = None

    def __len__(self) -> int:
        return len(self.rules)

    def __iter__(self) -> Iterator[Rule]:
        return iter(self.rules)

    @cached_property
    def by_antecedent(self) -> dict:
        index = {}
        for r in self.rules:
            index.setdefault(r.antecedent, []).append(r)
        return index

    def level_counts(self) -> dict:
        counts = {lvl.label: 0 for lvl in ControlLevel}
        for r in self.rules:
            counts[r.consequent.label] += 1
        return counts


@dataclass(frozen=True)
class ControlTally:
    low: float = 0.0
    moderate: float = 0.0
    high: float = 0.0

    def __post_init__(self):
        for lvl in ControlLevel:
            if self[lvl] < 0:
                raise InvariantViolation("tally", f"{lvl.label} is negative")

    def __getitem__(self, level: ControlLevel) -> float:
        return getattr(self, ControlLevel(level).label)

    @classmethod
    def from_mapping(cls, m: Mapping) -> "ControlTally":
        return cls(**{ControlLevel(k).label: float(v) for k, v in m.items()})

    def as_dict(self) -> dict:
        return {lvl.label: self[lvl] for lvl in ControlLevel}

    def argmax(self) -> Optional[ControlLevel]:
        """Highest-scoring level, ties toward the more severe one; None when all zero."""
        best = max(ControlLevel, key=lambda lvl: (self[lvl], int(lvl)))
        return None if self[best] == 0 else best


