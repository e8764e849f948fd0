"""Disclosure gate: who may hear how much of a conversation.

Participants co-own what was said and always get full access.  Everyone
else is served by control level: LOW is shared, MODERATE is summarized for
members of a trust group that includes a participant and refused to
anyone else, HIGH is refused.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Mapping

from .core import ControlLevel, ConversationRecord
from .exceptions import InvariantViolation, ParseError


class Action(Enum):
    FULL = "Full"
    SUMMARY = "Summary"
    REFUSE = "Refuse"


@dataclass(frozen=True)
class TrustGroupConfig:
    groups: Mapping[str, frozenset]

    def __post_init__(self):
        groups = {}
        for name, members in dict(self.groups).items():
            members = frozenset(members)
            if any(not m for m in members):
                raise InvariantViolation("groups", f"group {name!r} has an empty member id")
            groups[name] = members
        object.__setattr__(self, "groups", groups)

    __hash__ = None

    @classmethod
    def load(cls, path) -> "TrustGroupConfig":
        path = Path(path)
        try:
            doc = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ParseError(exc.msg, line=exc.lineno, path=str(path)) from None
        if not isinstance(doc, dict) or not all(isinstance(v, list) for v in doc.values()):
            raise ParseError("expected {group: [member ids...]}", path=str(path))
        return cls(doc)

    def shared_group(self, querier: str, people) -> str | None:
        """Name of the first (sorted) group holding ``querier`` and one of ``people``."""
        people = frozenset(people)
        for name in sorted(self.groups):
            members = self.groups[name]
            if querier in members and members & people:
                return name
        return None


@dataclass(frozen=True)
class DisclosureDecision:
    action: Action
    reason: str

    def __post_init__(self):
        if not self.reason:
            raise InvariantViolation("reason", "must be non-empty")

    def to_dict(self) -> dict:
        return {"action": self.action.value, "reason": self.reason}


def decide_disclosure(record: ConversationRecord, level: ControlLevel, querier: str,
                      groups: TrustGroupConfig = TrustGroupConfig({})) -> DisclosureDecision:
    if not querier:
        raise ValueError("querier id must be non-empty")
    level = ControlLevel(level)
    owners = record.context.participants
    if querier in owners:
        return DisclosureDecision(Action.FULL, f"{querier} is a co-owner (participant) of {record.id}")
    if level == ControlLevel.LOW:
        return DisclosureDecision(Action.FULL, "low control: shareable with others")
    if level == ControlLevel.MODERATE:
        group = groups.shared_group(querier, owners)
        if group is not None:
            return DisclosureDecision(Action.SUMMARY,
                                      f"moderate control: {querier} shares trust group {group!r} with a participant")
        return DisclosureDecision(Action.REFUSE, f"moderate control: {querier} is outside every participant's trust groups")
    return DisclosureDecision(Action.REFUSE, "high control: not shared beyond participants")
