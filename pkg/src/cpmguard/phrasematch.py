"""Privacy-indication phrase detection by token-set cosine similarity."""

from __future__ import annotations

import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Optional, Sequence

from .core import ConversationRecord
from .exceptions import InvariantViolation, ParseError
from .text import tokenize

DEFAULT_THRESHOLD = 0.7


@dataclass(frozen=True)
class Phrasebook:
    phrases: tuple
    threshold: float = DEFAULT_THRESHOLD

    def __post_init__(self):
        phrases = tuple(p.strip() for p in self.phrases if p.strip())
        if not phrases:
            raise InvariantViolation("phrases", "phrasebook is empty")
        if not 0.0 < self.threshold <= 1.0:
            raise InvariantViolation("threshold", f"{self.threshold} not in (0, 1]")
        object.__setattr__(self, "phrases", phrases)
        object.__setattr__(self, "_token_sets", tuple(frozenset(tokenize(p)) for p in phrases))

    @classmethod
    def load(cls, path, threshold: float = DEFAULT_THRESHOLD) -> "Phrasebook":
        """Read one phrase per line; blank lines and ``#`` comments are skipped."""
        try:
            text = Path(path).read_text(encoding="utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError(f"not UTF-8: {exc}", path=str(path)) from None
        return cls.from_text(text, threshold, source=str(path))

    @classmethod
    def from_text(cls, text: str, threshold: float = DEFAULT_THRESHOLD, source=None) -> "Phrasebook":
        phrases = []
        for line in text.splitlines():
            line = line.strip()
            if line and not line.startswith("#"):
                phrases.append(line)
        if not phrases:
            raise ParseError("phrasebook contains no phrases", path=source)
        return cls(tuple(phrases), threshold)

    @classmethod
    def default(cls, threshold: float = DEFAULT_THRESHOLD) -> "Phrasebook":
        text = resources.files("cpmguard").joinpath("data/phrases.txt").read_text(encoding="utf-8")
        return cls.from_text(text, threshold, source="<bundled phrases.txt>")


@dataclass(frozen=True)
class PhraseMatch:
    utterance_index: int
    phrase: str
    similarity: float


def _cosine(a: frozenset, b: frozenset) -> float:
    if not a or not b:
        return 0.0
    return len(a & b) / math.sqrt(len(a) * len(b))


def similarity(a: str, b: str) -> float:
    """Binary cosine between the token sets of ``a`` and ``b``; 0 if either is empty."""
    return _cosine(frozenset(tokenize(a)), frozenset(tokenize(b)))


def detect_privacy_indication(record: ConversationRecord, book: Phrasebook) -> Optional[PhraseMatch]:
    """Best (utterance, phrase) pair at or above the book's threshold, else None.

    Each utterance is compared on its own.  Ties go to the earliest
    utterance, then to the earliest phrase in the book.
    """
    return best_match([u.text for u in record.utterances], book)


def best_match(utterances: Sequence[str], book: Phrasebook) -> Optional[PhraseMatch]:
    best = None
    best_sim = -1.0
    for i, text in enumerate(utterances):
        toks = frozenset(tokenize(text))
        for phrase, ptoks in zip(book.phrases, book._token_sets):
            sim = _cosine(toks, ptoks)
            if sim > best_sim:
                best, best_sim = (i, phrase), sim
    if best is None or best_sim < book.threshold:
        return None
    return PhraseMatch(best[0], best[1], best_sim)
