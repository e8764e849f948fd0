"""Control-level prediction by weighted rule voting.

Each rule whose antecedent matches the sample adds the mean weight of its
matched items to its consequent's tally; the level with the largest tally
wins.  A detected privacy-indication phrase forces HIGH regardless.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_levels, check_tuples
from .core import ControlLevel, ControlTally, MetadataTuple, Rule, RuleSet, WeightVector, format_item
from .miner import MinerConfig, generate_rules, to_transactions

FULL = "full"
PARTIAL = "partial"
MATCH_MODES = (FULL, PARTIAL)

# full-match lookups enumerate the sample's item subsets; beyond this many
# items a linear scan over the rules is cheaper
_SUBSET_ENUM_LIMIT = 12


@dataclass(frozen=True)
class RuleVote:
    rule: Rule
    matched: frozenset
    exact: Fraction  # mean weight of the matched items, computed exactly

    @property
    def contribution(self) -> float:
        return float(self.exact)


@dataclass(frozen=True)
class Explanation:
    entries: tuple
    tally: ControlTally
    predicted: ControlLevel
    overridden: bool = False

    def to_dict(self) -> dict:
        return {
            "predicted": self.predicted.label,
            "overridden": self.overridden,
            "tally": self.tally.as_dict(),
            "entries": [
                {
                    "antecedent": sorted(format_item(i) for i in e.rule.antecedent),
                    "consequent": e.rule.consequent.label,
                    "matched": sorted(format_item(i) for i in e.matched),
                    "contribution": e.contribution,
                    "support": e.rule.support,
                    "confidence": e.rule.confidence,
                }
                for e in self.entries
            ],
        }


def _check_mode(match_mode):
    if match_mode not in MATCH_MODES:
        raise ValueError(f"match_mode must be one of {MATCH_MODES}, got {match_mode!r}")


def _votes(sample: MetadataTuple, ruleset: RuleSet, match_mode: str) -> list:
    items = sample.items()
    # Rational arithmetic keeps tallies that are equal as formulas in the
    # weights exactly equal, whatever the weights' scale.
    weights = {a: Fraction(ruleset.weights[a]) for a, _ in items}
    if match_mode == FULL and len(items) <= _SUBSET_ENUM_LIMIT and 2 ** len(items) < len(ruleset):
        index = ruleset.by_antecedent
        rules = [r for k in range(1, len(items) + 1) for sub in combinations(sorted(items), k)
                 for r in index.get(frozenset(sub), ())]
    else:
        rules = ruleset.rules
    votes = []
    for rule in rules:
        matched = rule.antecedent & items
        floor = len(rule.antecedent) if match_mode == FULL else 1
        if not matched or len(matched) < floor:
            continue
        votes.append(RuleVote(rule, matched, sum(weights[a] for a, _ in matched) / len(matched)))
    votes.sort(key=lambda v: v.rule.key)
    return votes


def _exact_tally(votes) -> dict:
    tally = {lvl: Fraction(0) for lvl in ControlLevel}
    for v in votes:
        tally[v.rule.consequent] += v.exact
    return tally


def score_controls(sample: MetadataTuple, ruleset: RuleSet, match_mode: str = FULL) -> ControlTally:
    """Per-level vote totals for ``sample``.

    ``match_mode="full"`` (default) counts a rule only when its whole
    antecedent is present; ``"partial"`` counts any rule sharing at least
    one item, averaging the weights of the shared items only.
    """
    _check_mode(match_mode)
    return _as_tally(_exact_tally(_votes(sample, ruleset, match_mode)))


def _as_tally(exact: dict) -> ControlTally:
    return ControlTally(**{lvl.label: float(v) for lvl, v in exact.items()})


def _decide(sample: MetadataTuple, exact: dict):
    if sample.privacy_phrase:
        return ControlLevel.HIGH, True
    best = max(ControlLevel, key=lambda lvl: (exact[lvl], int(lvl)))
    if exact[best] == 0:
        # no evidence at all: fail safe
        return ControlLevel.HIGH, False
    return best, False


def predict(sample: MetadataTuple, ruleset: RuleSet, match_mode: str = FULL) -> ControlLevel:
    _check_mode(match_mode)
    return _decide(sample, _exact_tally(_votes(sample, ruleset, match_mode)))[0]


def explain(sample: MetadataTuple, ruleset: RuleSet, match_mode: str = FULL) -> Explanation:
    _check_mode(match_mode)
    votes = _votes(sample, ruleset, match_mode)
    exact = _exact_tally(votes)
    level, overridden = _decide(sample, exact)
    return Explanation(tuple(votes), _as_tally(exact), level, overridden)


class RuleVotingClassifier(ClassifierMixin, BaseEstimator):
    """Mine control-level association rules in ``fit``; vote in ``predict``.

    ``X`` is a sequence of :class:`MetadataTuple`, ``y`` a sequence of
    :class:`ControlLevel` (or their names).  After fitting, ``ruleset_``
    holds the mined :class:`RuleSet`.

    Parameters
    ----------
    n_supports : int
        Sweep supports ``0/n .. n_supports/n``.
    min_confidence : float
    max_antecedent_size : int
    weights : mapping of attribute name to weight, optional
        Missing attributes weigh 1.0.
    match_mode : {"full", "partial"}
    version : int
        Version stamped on the mined rule set.
    """

    def __init__(self, n_supports=0, min_confidence=0.5, max_antecedent_size=7, weights=None,
                 match_mode=FULL, version=1):
        self.n_supports = n_supports
        self.min_confidence = min_confidence
        self.max_antecedent_size = max_antecedent_size
        self.weights = weights
        self.match_mode = match_mode
        self.version = version

    def fit(self, X, y):
        _check_mode(self.match_mode)
        samples = check_tuples(X)
        labels = check_levels(y, len(samples))
        config = MinerConfig(self.n_supports, self.min_confidence, self.max_antecedent_size)
        self.ruleset_ = generate_rules(to_transactions(samples, labels), config,
                                       WeightVector(self.weights), self.version)
        self.classes_ = np.array(list(ControlLevel), dtype=object)
        return self

    @classmethod
    def from_ruleset(cls, ruleset: RuleSet, match_mode=FULL) -> "RuleVotingClassifier":
        prov = ruleset.provenance
        clf = cls(
            n_supports=prov.get("n_supports", 0),
            min_confidence=prov.get("min_confidence", 0.5),
            max_antecedent_size=prov.get("max_antecedent_size", 7),
            weights=dict(ruleset.weights),
            match_mode=match_mode,
            version=ruleset.version,
        )
        clf.ruleset_ = ruleset
        clf.classes_ = np.array(list(ControlLevel), dtype=object)
        return clf

    def predict(self, X):
        check_is_fitted(self, "ruleset_")
        return np.array([predict(s, self.ruleset_, self.match_mode) for s in check_tuples(X)],
                        dtype=object)

    def decision_function(self, X):
        """Tallies as an ``(n_samples, 3)`` array ordered LOW, MODERATE, HIGH."""
        check_is_fitted(self, "ruleset_")
        rows = []
        for s in check_tuples(X):
            t = score_controls(s, self.ruleset_, self.match_mode)
            rows.append([t[lvl] for lvl in ControlLevel])
        return np.array(rows, dtype=float).reshape(-1, len(ControlLevel))

    def explain(self, sample: MetadataTuple) -> Explanation:
        check_is_fitted(self, "ruleset_")
        return explain(sample, self.ruleset_, self.match_mode)

    def score(self, X, y, sample_weight=None):
        from sklearn.metrics import accuracy_score

        samples = check_tuples(X)
        return accuracy_score([int(v) for v in check_levels(y, len(samples))],
                              [int(v) for v in self.predict(samples)], sample_weight=sample_weight)

    def __sklearn_tags__(self):
        tags = super().__sklearn_tags__()
        tags.input_tags.two_d_array = False
        tags.input_tags.categorical = True
        tags.target_tags.required = True
        return tags
