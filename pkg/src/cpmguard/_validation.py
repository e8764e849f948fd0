"""Input checks used by the estimators (sklearn's array validators do not
apply: inputs here are sequences of records and tuples, not arrays)."""

from .core import ControlLevel, ConversationRecord, MetadataTuple
from .exceptions import MissingLabels


def check_records(X):
    records = list(X)
    for r in records:
        if not isinstance(r, ConversationRecord):
            raise TypeError(f"expected ConversationRecord, got {type(r).__name__}")
    return records


def check_tuples(X):
    samples = list(X)
    for s in samples:
        if not isinstance(s, MetadataTuple):
            raise TypeError(f"expected MetadataTuple, got {type(s).__name__}")
    return samples


def check_levels(y, n):
    """Coerce labels to ControlLevel; raise MissingLabels on None or length mismatch."""
    if y is None:
        raise MissingLabels("labels are required")
    y = list(y)
    if len(y) != n:
        raise ValueError(f"got {n} samples but {len(y)} labels")
    out = []
    for i, v in enumerate(y):
        if v is None:
            raise MissingLabels(f"sample {i} has no label")
        out.append(v if isinstance(v, ControlLevel) else
                   ControlLevel.parse(v) if isinstance(v, str) else ControlLevel(int(v)))
    return out
