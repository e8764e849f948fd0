"""Scenario corpora: JSON Lines I/O, privacy-score labeling, splitting,
evaluation, and feedback ingestion."""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .core import (
    ContextInfo,
    ControlLevel,
    ConversationRecord,
    LocationClass,
    MetadataTuple,
    PrivacyViolation,
    RelationshipClass,
    RuleSet,
    Utterance,
)
from .exceptions import (
    BadCount,
    DuplicateScenarioId,
    EmptyResponses,
    InvariantViolation,
    OutOfRange,
    ParseError,
    UnlabeledScenario,
)
from .inference import FULL, predict

SCALE_MIN = 0.0
SCALE_MAX = 6.0


@dataclass(frozen=True)
class LabelThresholds:
    low_upper: float = 2.3
    moderate_upper: float = 3.1
    # higher mean privacy score means a more sensitive conversation
    higher_is_sensitive: bool = True

    def __post_init__(self):
        if not SCALE_MIN <= self.low_upper < self.moderate_upper <= SCALE_MAX:
            raise InvariantViolation(
                "thresholds", f"need 0 <= low_upper < moderate_upper <= 6, got "
                              f"{self.low_upper}, {self.moderate_upper}")

    @classmethod
    def parse(cls, text: str) -> "LabelThresholds":
        """Parse ``"low,mod"`` as used on the command line."""
        try:
            lo, mod = (float(p) for p in text.split(","))
        except ValueError:
            raise ValueError(f"thresholds must look like '2.3,3.1', got {text!r}") from None
        return cls(lo, mod)


@dataclass(frozen=True)
class Scenario:
    record: ConversationRecord
    metadata: Optional[MetadataTuple] = None
    responses: Optional[tuple] = None
    label: Optional[ControlLevel] = None
    realism: Optional[float] = None

    def __post_init__(self):
        if self.responses is not None:
            resp = tuple(float(r) for r in self.responses)
            for r in resp:
                if not SCALE_MIN <= r <= SCALE_MAX:
                    raise InvariantViolation("responses", f"rating {r} outside the 0-6 scale", self.id)
            object.__setattr__(self, "responses", resp)
        if self.label is not None:
            object.__setattr__(self, "label", ControlLevel(self.label))

    __hash__ = None

    @property
    def id(self) -> str:
        return self.record.id

    def resolve_label(self, thresholds: Optional[LabelThresholds] = None) -> Optional[ControlLevel]:
        """Explicit label if present, else the thresholded privacy score."""
        if self.label is not None:
            return self.label
        if self.responses and thresholds is not None:
            return label_control(compute_privacy_score(self.responses), thresholds)
        return None


@dataclass(frozen=True)
class EvalReport:
    accuracy: float
    confusion: np.ndarray  # rows: true level, cols: predicted level
    precision: dict
    recall: dict

    __hash__ = None

    @property
    def total(self) -> int:
        return int(self.confusion.sum())

    def to_dict(self) -> dict:
        return {
            "accuracy": self.accuracy,
            "total": self.total,
            "levels": [lvl.label for lvl in ControlLevel],
            "confusion": self.confusion.tolist(),
            "precision": self.precision,
            "recall": self.recall,
        }

    def to_table(self) -> str:
        names = [lvl.label for lvl in ControlLevel]
        w = max(len(n) for n in names) + 2
        lines = ["true\\pred".ljust(w + 2) + "".join(n.rjust(w) for n in names)]
        for name, row in zip(names, self.confusion):
            lines.append(name.ljust(w + 2) + "".join(str(int(c)).rjust(w) for c in row))
        lines.append("")
        lines.append("level".ljust(w + 2) + "precision".rjust(11) + "recall".rjust(11) + "support".rjust(9))
        for i, name in enumerate(names):
            lines.append(name.ljust(w + 2) + f"{self.precision[name]:11.4f}{self.recall[name]:11.4f}"
                         + f"{int(self.confusion[i].sum()):9d}")
        lines.append("")
        lines.append(f"accuracy {self.accuracy:.4f} ({int(np.trace(self.confusion))}/{self.total})")
        return "\n".join(lines)


# --------------------------------------------------------------------------
# JSON Lines serialization
# --------------------------------------------------------------------------


def record_from_dict(d: dict) -> ConversationRecord:
    if not isinstance(d, dict):
        raise InvariantViolation("record", "expected a JSON object")
    rid = d.get("id")
    if not isinstance(rid, str) or not rid:
        raise InvariantViolation("id", "missing or not a non-empty string", rid)
    transcript = d.get("transcript")
    if not isinstance(transcript, list):
        raise InvariantViolation("transcript", "expected a list of {speaker, text}", rid)
    try:
        utts = [Utterance(str(u["speaker"]), str(u["text"])) for u in transcript]
    except (KeyError, TypeError):
        raise InvariantViolation("transcript", "each entry needs 'speaker' and 'text'", rid) from None
    return ConversationRecord(rid, tuple(utts), context_from_dict(d.get("context"), rid),
                              d.get("timestamp"))


def context_from_dict(c, rid=None) -> ContextInfo:
    if not isinstance(c, dict):
        raise InvariantViolation("context", "expected an object", rid)
    try:
        rels = {frozenset((r["a"], r["b"])): RelationshipClass(r["class"])
                for r in c.get("relationships", [])}
        location = LocationClass(c.get("location", LocationClass.DOMESTIC.value))
        pv = c.get("pv_type")
        return ContextInfo(
            participants=frozenset(c.get("participants", [])),
            relationships=rels,
            location=location,
            pv_type=None if pv is None else PrivacyViolation(pv.replace("-", "")),
        )
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, InvariantViolation):
            raise InvariantViolation(exc.field, exc.reason, rid) from None
        raise InvariantViolation("context", str(exc), rid) from None


def record_to_dict(r: ConversationRecord) -> dict:
    ctx = r.context
    d = {
        "id": r.id,
        "transcript": [{"speaker": u.speaker, "text": u.text} for u in r.utterances],
        "context": {
            "participants": sorted(ctx.participants),
            "relationships": [
                {"a": a, "b": b, "class": cls.value}
                for (a, b), cls in sorted((tuple(sorted(p)), c) for p, c in ctx.relationships.items())
            ],
            "location": ctx.location.value,
        },
    }
    if ctx.pv_type is not None:
        d["context"]["pv_type"] = ctx.pv_type.value
    if r.timestamp is not None:
        d["timestamp"] = r.timestamp
    return d


def scenario_from_dict(d: dict) -> Scenario:
    record = record_from_dict(d)
    label = d.get("label")
    if label is not None:
        try:
            label = ControlLevel.parse(label)
        except ValueError as exc:
            raise InvariantViolation("label", str(exc), record.id) from None
    meta = d.get("metadata")
    if meta is not None:
        try:
            meta = MetadataTuple.from_dict(meta)
        except (ValueError, TypeError) as exc:
            raise InvariantViolation("metadata", str(exc), record.id) from None
    responses = d.get("responses")
    if responses is not None and (not isinstance(responses, list)
                                  or not all(isinstance(x, (int, float)) for x in responses)):
        raise InvariantViolation("responses", "expected a list of numbers", record.id)
    return Scenario(record, meta, responses, label, d.get("realism"))


def scenario_to_dict(s: Scenario) -> dict:
    d = record_to_dict(s.record)
    if s.metadata is not None:
        d["metadata"] = s.metadata.to_dict()
    if s.responses is not None:
        d["responses"] = list(s.responses)
    if s.label is not None:
        d["label"] = s.label.label
    if s.realism is not None:
        d["realism"] = s.realism
    return d


def parse_corpus(text: str, source=None) -> list:
    scenarios = []
    seen = set()
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        try:
            doc = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ParseError(exc.msg, line=lineno, path=source) from None
        try:
            s = scenario_from_dict(doc)
        except InvariantViolation as exc:
            exc.args = (f"{source or '<input>'}:{lineno}: {exc}",)
            exc.line = lineno
            raise
        if s.id in seen:
            raise DuplicateScenarioId(f"{source or '<input>'}:{lineno}: duplicate scenario id {s.id!r}")
        seen.add(s.id)
        scenarios.append(s)
    return scenarios


def load_corpus(path) -> list:
    """Read a JSON Lines corpus; blank lines are skipped."""
    path = Path(path)
    return parse_corpus(path.read_text(encoding="utf-8"), source=str(path))


def dump_corpus(corpus: Sequence[Scenario]) -> str:
    return "".join(json.dumps(scenario_to_dict(s), ensure_ascii=False) + "\n" for s in corpus)


def save_corpus(corpus: Sequence[Scenario], path) -> None:
    Path(path).write_text(dump_corpus(corpus), encoding="utf-8")


# --------------------------------------------------------------------------
# labeling
# --------------------------------------------------------------------------


def compute_privacy_score(responses: Sequence[float]) -> float:
    responses = list(responses)
    if not responses:
        raise EmptyResponses("privacy score needs at least one response")
    return sum(responses) / len(responses)


def label_control(score: float, t: LabelThresholds = LabelThresholds()) -> ControlLevel:
    """Threshold a 0-6 privacy score; both thresholds belong to MODERATE."""
    if not SCALE_MIN <= score <= SCALE_MAX:
        raise OutOfRange(f"privacy score {score} outside the 0-6 scale")
    if score < t.low_upper:
        level = ControlLevel.LOW
    elif score <= t.moderate_upper:
        level = ControlLevel.MODERATE
    else:
        level = ControlLevel.HIGH
    if not t.higher_is_sensitive:
        level = ControlLevel(ControlLevel.HIGH - level)
    return level


def label_distribution(corpus: Sequence[Scenario], thresholds: Optional[LabelThresholds] = None) -> dict:
    counts = {lvl.label: 0 for lvl in ControlLevel}
    for s in corpus:
        lvl = s.resolve_label(thresholds)
        if lvl is None:
            raise UnlabeledScenario(f"scenario {s.id!r} has no label")
        counts[lvl.label] += 1
    return counts


def split(corpus: Sequence[Scenario], seed: int, train_count: int):
    """Seeded shuffle, then the first ``train_count`` scenarios train."""
    corpus = list(corpus)
    if not 0 <= train_count <= len(corpus):
        raise BadCount(f"train_count {train_count} not in [0, {len(corpus)}]")
    order = list(range(len(corpus)))
    random.Random(seed).shuffle(order)
    train = [corpus[i] for i in order[:train_count]]
    test = [corpus[i] for i in order[train_count:]]
    return train, test


# --------------------------------------------------------------------------
# training data and evaluation
# --------------------------------------------------------------------------


def resolve_metadata(scenario: Scenario, extractor=None) -> MetadataTuple:
    if scenario.metadata is not None:
        return scenario.metadata
    if extractor is None:
        raise InvariantViolation("metadata", "not precomputed and no extractor given", scenario.id)
    return extractor.extract(scenario.record)


def training_data(corpus: Sequence[Scenario], extractor=None, thresholds: Optional[LabelThresholds] = None):
    """``(tuples, labels)`` for fitting; labels may be None where unresolved."""
    X = [resolve_metadata(s, extractor) for s in corpus]
    y = [s.resolve_label(thresholds) for s in corpus]
    return X, y


def evaluate(ruleset: RuleSet, scenarios: Sequence[Scenario], extractor=None,
             thresholds: Optional[LabelThresholds] = None, match_mode: str = FULL) -> EvalReport:
    confusion = np.zeros((3, 3), dtype=int)
    for s in scenarios:
        truth = s.resolve_label(thresholds)
        if truth is None:
            raise UnlabeledScenario(f"scenario {s.id!r} has no label")
        pred = predict(resolve_metadata(s, extractor), ruleset, match_mode)
        confusion[int(truth), int(pred)] += 1
    return report_from_confusion(confusion)


def report_from_confusion(confusion: np.ndarray) -> EvalReport:
    total = int(confusion.sum())
    accuracy = float(np.trace(confusion)) / total if total else 0.0
    precision, recall = {}, {}
    for lvl in ControlLevel:
        i = int(lvl)
        col, row = confusion[:, i].sum(), confusion[i, :].sum()
        precision[lvl.label] = float(confusion[i, i] / col) if col else 0.0
        recall[lvl.label] = float(confusion[i, i] / row) if row else 0.0
    return EvalReport(accuracy, confusion, precision, recall)


def ingest_feedback(corpus: Sequence[Scenario], record: ConversationRecord, match, extractor=None) -> list:
    """Return a new corpus with ``record`` appended as a HIGH-control scenario.

    ``match`` is the privacy-indication match detected in ``record``.  With
    an extractor, the scenario's metadata is computed now; otherwise it is
    left for training time.
    """
    if match is None:
        raise ValueError("ingest_feedback needs a privacy-indication match")
    if not 0 <= match.utterance_index < len(record.utterances):
        raise ValueError("match does not refer to an utterance of this record")
    if any(s.id == record.id for s in corpus):
        raise DuplicateScenarioId(f"scenario {record.id!r} already in corpus")
    meta = extractor.extract(record) if extractor is not None else None
    if meta is not None and not meta.privacy_phrase:
        meta = replace(meta, privacy_phrase=True)
    return [*corpus, Scenario(record, meta, None, ControlLevel.HIGH)]
