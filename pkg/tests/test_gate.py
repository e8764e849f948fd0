import json
import random

import pytest

from cpmguard.core import ContextInfo, ControlLevel, ConversationRecord
from cpmguard.exceptions import InvariantViolation, ParseError
from cpmguard.gate import Action, DisclosureDecision, TrustGroupConfig, decide_disclosure

H, M, L = ControlLevel.HIGH, ControlLevel.MODERATE, ControlLevel.LOW
REC = ConversationRecord("misty-bill", [("misty", "hi"), ("bill", "hello")], ContextInfo({"misty", "bill"}))
GROUPS = TrustGroupConfig({"family": {"bill", "barbara"}, "work": {"misty", "carl"}})


@pytest.mark.parametrize("level", list(ControlLevel))
def test_co_owner_always_full(level):
    assert decide_disclosure(REC, level, "misty", GROUPS).action is Action.FULL


def test_high_refuses_outsider():
    assert decide_disclosure(REC, H, "barbara", GROUPS).action is Action.REFUSE


def test_moderate_summary_for_group_member():
    d = decide_disclosure(REC, M, "barbara", GROUPS)
    assert d.action is Action.SUMMARY and "family" in d.reason


def test_moderate_refuses_plain_outsider():
    assert decide_disclosure(REC, M, "zoe", GROUPS).action is Action.REFUSE


def test_low_shares_with_anyone():
    assert decide_disclosure(REC, L, "zoe", GROUPS).action is Action.FULL


def test_empty_querier():
    with pytest.raises(ValueError):
        decide_disclosure(REC, L, "", GROUPS)


def test_reason_required():
    with pytest.raises(InvariantViolation):
        DisclosureDecision(Action.FULL, "")


def test_groups_file(tmp_path):
    p = tmp_path / "g.json"
    p.write_text(json.dumps({"family": ["a", "b"]}), encoding="utf-8")
    assert TrustGroupConfig.load(p).groups["family"] == {"a", "b"}
    p.write_text(json.dumps({"family": "a"}), encoding="utf-8")
    with pytest.raises(ParseError):
        TrustGroupConfig.load(p)
    with pytest.raises(InvariantViolation):
        TrustGroupConfig({"x": {""}})


def test_monotone_in_level_random():
    rng = random.Random(0)
    order = {Action.FULL: 0, Action.SUMMARY: 1, Action.REFUSE: 2}
    for _ in range(200):
        people = [f"p{i}" for i in range(6)]
        parts = set(rng.sample(people, rng.randint(1, 3)))
        rec = ConversationRecord("r", [(p, "x") for p in sorted(parts)], ContextInfo(parts))
        groups = TrustGroupConfig({f"g{i}": set(rng.sample(people, rng.randint(1, 4))) for i in range(3)})
        q = rng.choice(people + ["outsider"])
        actions = [order[decide_disclosure(rec, lvl, q, groups).action] for lvl in ControlLevel]
        assert actions == sorted(actions)
