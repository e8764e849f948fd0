"""Synthetic data: planted-rule tuple generators and a scripted demo corpus.

Both are seeded and fully deterministic.  The planted generator checks that
the miner recovers known structure; the scripted corpus gives the CLI
something realistic-looking to chew on (58 scenarios, 15/27/16 low /
moderate / high once thresholded at the default 2.3 / 3.1).
"""

from __future__ import annotations

import random
from typing import Optional

from .core import (
    ContextInfo,
    ControlLevel,
    ConversationRecord,
    Detail,
    LocationClass,
    MetadataTuple,
    People,
    PrivacyViolation,
    RelationshipClass,
    Sentiment,
    Utterance,
)
from .corpus import Scenario, compute_privacy_score, label_control

TOPICS = (None, "Arts & Entertainment", "Autos & Vehicles", "Finance", "Health", "Jobs & Education",
          "Travel")

DOMAINS = {
    "sentiment": tuple(Sentiment),
    "topic": TOPICS,
    "location": tuple(LocationClass),
    "relationship": tuple(RelationshipClass),
    "detail": tuple(Detail),
    "people": tuple(People),
}

# One planted rule per relationship class, so the rules never overlap.
PLANTED_RULES = (
    ({"relationship": RelationshipClass.PROFESSIONAL, "sentiment": Sentiment.NEGATIVE}, ControlLevel.HIGH),
    ({"relationship": RelationshipClass.FAMILY, "location": LocationClass.DOMESTIC}, ControlLevel.LOW),
    ({"relationship": RelationshipClass.CLOSE, "detail": Detail.SHORT}, ControlLevel.LOW),
    ({"relationship": RelationshipClass.ACQUAINTANCE, "people": People.MANY}, ControlLevel.MODERATE),
    ({"relationship": RelationshipClass.STRANGER, "topic": "Health"}, ControlLevel.HIGH),
)


def random_tuple(rng: random.Random, privacy_phrase: Optional[bool] = None, **fixed) -> MetadataTuple:
    values = {a: fixed[a] if a in fixed else rng.choice(dom) for a, dom in DOMAINS.items()}
    values["privacy_phrase"] = rng.random() < 0.5 if privacy_phrase is None else privacy_phrase
    return MetadataTuple(**values)


def planted_samples(n: int, seed: int, noise: float = 0.05, rules=PLANTED_RULES):
    """Draw ``n`` tuples, each generated by one planted rule.

    Returns ``(X, y_observed, y_true)``: a fraction ``noise`` of the
    observed labels is flipped to a different level.
    """
    rng = random.Random(seed)
    X, y_obs, y_true = [], [], []
    for _ in range(n):
        antecedent, level = rules[rng.randrange(len(rules))]
        X.append(random_tuple(rng, privacy_phrase=False, **antecedent))
        y_true.append(level)
        if rng.random() < noise:
            y_obs.append(rng.choice([lvl for lvl in ControlLevel if lvl != level]))
        else:
            y_obs.append(level)
    return X, y_obs, y_true


# --------------------------------------------------------------------------
# scripted scenario corpus
# --------------------------------------------------------------------------

_TOPIC_LINES = {
    "Arts & Entertainment": ["Did you see the new movie with that actor from the series?",
                             "The director shot the whole film in one take.",
                             "The concert last night had the best band and a great song list."],
    "Autos & Vehicles": ["The car engine is making that noise again.",
                         "The mechanic said the brakes and the tires need work.",
                         "I had to leave the truck at the garage for an oil change."],
    "Finance": ["The bank turned down the loan application.",
                "We are behind on the mortgage and the credit card debt keeps growing.",
                "My salary barely covers rent and taxes this year."],
    "Health": ["The doctor called with the results from the hospital.",
               "The diagnosis means surgery and a long course of medication.",
               "The therapist thinks the symptoms are getting worse."],
    "Jobs & Education": ["The interview for the new job went on for hours.",
                         "My boss said the promotion went to someone else and the school fees are due.",
                         "The exam results from the university came in today."],
    "Travel": ["We booked the flight and the hotel for the vacation.",
               "The airport was packed and my passport almost expired.",
               "The beach trip is finally happening next month."],
    None: ["So anyway, that is what happened on Tuesday.",
           "I was telling her about it the other day.",
           "You know how these things go sometimes."],
}

_MOOD_LINES = {
    Sentiment.POSITIVE: ["Honestly it was wonderful and I am so happy about it.",
                         "That is great news, I love it.", "What an amazing day, I am thrilled."],
    Sentiment.SLIGHTLY_POSITIVE: ["It was okay, fairly decent overall.", "Sure, it was fine and a bit funny."],
    Sentiment.NEUTRAL: ["It is what it is.", "We will see what happens next."],
    Sentiment.SLIGHTLY_NEGATIVE: ["It was a little weird and kind of confusing, but fine.",
                                  "I am a bit tired and busy, that is all."],
    Sentiment.NEGATIVE: ["It is terrible and I am so upset about it.",
                         "I am worried and sad, this is a disaster.", "I hate how awful this has been."],
}

_FILLER = ["Yeah.", "Right, I see.", "Mm-hmm, go on.", "Really?", "Okay, and then what?",
           "I did not know that.", "Tell me more about it."]

_NAMES = ("ana", "ben", "cai", "dee", "eli", "fay", "gus")

# label -> (weights over moods, topics, relationships, P(domestic), P(privacy phrase))
_PROFILES = {
    ControlLevel.LOW: ([Sentiment.POSITIVE] * 4 + [Sentiment.SLIGHTLY_POSITIVE] * 2 + [Sentiment.NEUTRAL],
                       ["Arts & Entertainment"] * 3 + ["Travel"] * 2 + [None, "Autos & Vehicles"],
                       [RelationshipClass.FAMILY, RelationshipClass.CLOSE, RelationshipClass.CLOSE,
                        RelationshipClass.ACQUAINTANCE], 0.7, 0.0),
    ControlLevel.MODERATE: ([Sentiment.NEUTRAL, Sentiment.SLIGHTLY_NEGATIVE, Sentiment.SLIGHTLY_POSITIVE,
                             Sentiment.NEGATIVE],
                            ["Autos & Vehicles", "Jobs & Education", "Arts & Entertainment", None, "Travel"],
                            [RelationshipClass.FAMILY, RelationshipClass.CLOSE, RelationshipClass.PROFESSIONAL],
                            0.5, 0.0),
    ControlLevel.HIGH: ([Sentiment.NEGATIVE] * 3 + [Sentiment.SLIGHTLY_NEGATIVE],
                        ["Health", "Finance", "Health", "Jobs & Education", None],
                        [RelationshipClass.PROFESSIONAL, RelationshipClass.FAMILY, RelationshipClass.STRANGER],
                        0.4, 0.3),
}

_BANDS = {ControlLevel.LOW: (0.6, 2.2), ControlLevel.MODERATE: (2.4, 3.0), ControlLevel.HIGH: (3.3, 5.4)}


def _responses(rng: random.Random, level: ControlLevel, n: int = 9) -> list:
    lo, hi = _BANDS[level]
    target = rng.uniform(lo, hi)
    while True:
        ratings = [min(6, max(0, round(rng.gauss(target, 1.0)))) for _ in range(n)]
        if lo <= compute_privacy_score(ratings) <= hi:
            return [float(r) for r in ratings]


def scripted_scenario(rng: random.Random, sid: str, level: ControlLevel) -> Scenario:
    moods, topics, rels, p_dom, p_phrase = _PROFILES[level]
    mood = rng.choice(moods)
    topic = rng.choice(topics)
    n_people = rng.choice([2, 2, 2, 3, 4, 5])
    people = list(_NAMES[:n_people])
    rel = rng.choice(rels)
    relationships = {frozenset(people[:2]): rel}

    lines = list(_TOPIC_LINES[topic]) + list(_MOOD_LINES[mood])
    rng.shuffle(lines)
    n_lines = rng.choice([3, 5, 8, 14, 22])
    body = [lines[i] if i < len(lines) else rng.choice(_FILLER) for i in range(n_lines)]
    if rng.random() < p_phrase:
        body.insert(rng.randrange(len(body) + 1), "Don't tell anyone this.")
    utts = tuple(Utterance(people[i % n_people], text) for i, text in enumerate(body))
    record = ConversationRecord(
        sid, utts,
        ContextInfo(frozenset(people), relationships,
                    LocationClass.DOMESTIC if rng.random() < p_dom else LocationClass.NON_DOMESTIC,
                    rng.choice(list(PrivacyViolation))),
    )
    responses = _responses(rng, level)
    assert label_control(compute_privacy_score(responses)) == level
    return Scenario(record, responses=responses, realism=round(rng.uniform(3.5, 5.8), 2))


def scripted_corpus(seed: int = 7, counts=((ControlLevel.LOW, 15), (ControlLevel.MODERATE, 27),
                                           (ControlLevel.HIGH, 16))) -> list:
    """Scenarios labeled only through their survey-style ``responses``."""
    rng = random.Random(seed)
    levels = [lvl for lvl, k in counts for _ in range(k)]
    rng.shuffle(levels)
    return [scripted_scenario(rng, f"s{i + 1:03d}", lvl) for i, lvl in enumerate(levels)]
