import random

import pytest

from cpmguard.core import ContextInfo, ControlLevel, ConversationRecord, LocationClass, RelationshipClass
from cpmguard.extractors import MetadataExtractor
from cpmguard.miner import Transaction

_ACCEPTANCE = []


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_acceptance.py" in report.nodeid:
        _ACCEPTANCE.append((report.nodeid.split("::")[-1], report.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome in _ACCEPTANCE:
        terminalreporter.write_line(f"{'PASS' if outcome == 'passed' else 'FAIL'}  {name}")


@pytest.fixture(scope="session")
def extractor():
    return MetadataExtractor().fit()


@pytest.fixture
def control6_record():
    """Scripted car-trouble scene between two family members, away from home."""
    ctx = ContextInfo({"dad", "kid"}, {frozenset({"dad", "kid"}): RelationshipClass.FAMILY},
                      LocationClass.NON_DOMESTIC)
    return ConversationRecord("control-6", [
        ("dad", "The car broke down again on the highway this morning."),
        ("kid", "Again? That is terrible. What happened to the engine?"),
        ("dad", "The mechanic says the transmission is ruined and the brakes are bad too."),
        ("kid", "That sounds expensive. I am worried we cannot afford it."),
        ("dad", "I know. I am so frustrated with this truck, it has been a disaster."),
        ("kid", "Maybe we can ask the dealership about a cheaper repair."),
    ], ctx)


@pytest.fixture
def secret_record():
    ctx = ContextInfo({"ana", "ben"}, {frozenset({"ana", "ben"}): RelationshipClass.CLOSE})
    return ConversationRecord("secret-1", [
        ("ana", "Can I tell you something about work?"),
        ("ben", "Of course."),
        ("ana", "Don't tell anyone this."),
        ("ana", "I am thinking about quitting next month."),
    ], ctx)


def make_record(words_per_speaker, rid="r"):
    """Record with one utterance of the given word count per speaker."""
    speakers = [f"p{i}" for i in range(len(words_per_speaker))]
    utts = [(s, " ".join(["word"] * n)) for s, n in zip(speakers, words_per_speaker)]
    return ConversationRecord(rid, utts, ContextInfo(frozenset(speakers)))


def random_transactions(rng: random.Random, n_tx=None, n_attr=None, n_val=None, sparse=0.15):
    n_tx = n_tx or rng.randint(1, 10)
    n_attr = n_attr or rng.randint(1, 6)
    n_val = n_val or rng.randint(1, 3)
    levels = list(ControlLevel)
    out = []
    for _ in range(n_tx):
        items = {(f"a{j}", f"v{rng.randrange(n_val)}") for j in range(n_attr) if rng.random() >= sparse}
        out.append(Transaction(items, rng.choice(levels)))
    return out
