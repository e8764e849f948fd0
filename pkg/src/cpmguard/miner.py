"""Association-rule mining from labeled metadata tuples.

The miner is a level-wise apriori over vertical tid-sets (Python ints used
as bitsets), restricted at rule-emission time to rules whose consequent is
a single control level.  :func:`generate_rules` collects rules over a
sweep of support thresholds ``i / n`` for ``i = 0..N`` and merges the
results into one :class:`RuleSet`.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from pathlib import Path
from typing import Iterable, Optional, Sequence

from .core import (
    ATTRIBUTES,
    format_item,
    parse_item,
    LABEL_ATTRIBUTE,
    ControlLevel,
    MetadataTuple,
    Rule,
    RuleSet,
    WeightVector,
)
from .exceptions import EmptyCorpus, InvariantViolation, MissingLabels, ParseError

__all__ = [
    "Transaction",
    "MinerConfig",
    "to_transactions",
    "min_support_count",
    "mine_frequent_itemsets",
    "modified_apriori",
    "generate_rules",
    "sweep_supports",
    "ruleset_to_dict",
    "ruleset_from_dict",
    "save_ruleset",
    "load_ruleset",
]


@dataclass(frozen=True)
class Transaction:
    items: frozenset
    label: Optional[ControlLevel] = None

    def __post_init__(self):
        object.__setattr__(self, "items", frozenset(tuple(i) for i in self.items))
        if self.label is not None:
            object.__setattr__(self, "label", ControlLevel(self.label))

    @classmethod
    def from_tuple(cls, sample: MetadataTuple, label=None) -> "Transaction":
        return cls(sample.items(), label)

    @property
    def label_item(self):
        return None if self.label is None else (LABEL_ATTRIBUTE, self.label.label)

    def all_items(self) -> frozenset:
        if self.label is None:
            return self.items
        return self.items | {self.label_item}


@dataclass(frozen=True)
class MinerConfig:
    n_supports: int = 0
    min_confidence: float = 0.5
    max_antecedent_size: int = len(ATTRIBUTES)

    def __post_init__(self):
        if int(self.n_supports) < 0:
            raise InvariantViolation("n_supports", "must be >= 0")
        if not 0.0 <= self.min_confidence <= 1.0:
            raise InvariantViolation("min_confidence", "must lie in [0, 1]")
        if int(self.max_antecedent_size) < 1:
            raise InvariantViolation("max_antecedent_size", "must be >= 1")

    def snapshot(self) -> dict:
        return {
            "n_supports": int(self.n_supports),
            "min_confidence": float(self.min_confidence),
            "max_antecedent_size": int(self.max_antecedent_size),
        }


def to_transactions(samples: Iterable[MetadataTuple], labels: Iterable = None) -> list:
    samples = list(samples)
    labels = [None] * len(samples) if labels is None else list(labels)
    return [Transaction.from_tuple(s, y) for s, y in zip(samples, labels, strict=True)]


def min_support_count(support, n: int) -> int:
    """Smallest transaction count meeting ``support`` on ``n`` transactions.

    Never below 1, so the zero-support sweep only keeps itemsets that
    actually occur.  Float supports are matched against ``k / n`` with a
    small slack so that e.g. ``0.7 * 10`` rounds to 7, not 8.
    """
    if isinstance(support, (int, Fraction)):
        need = math.ceil(Fraction(support) * n)
    else:
        need = math.ceil(float(support) * n - 1e-9)
    return max(1, need)


def _frequent_counts(transactions: Sequence[Transaction], support, max_size=None) -> dict:
    n = len(transactions)
    if n == 0:
        raise EmptyCorpus("cannot mine an empty transaction set")
    min_count = min_support_count(support, n)

    tids = {}
    for i, t in enumerate(transactions):
        bit = 1 << i
        for item in t.all_items():
            tids[item] = tids.get(item, 0) | bit

    level = {(item,): bits for item, bits in sorted(tids.items()) if bits.bit_count() >= min_count}
    counts = {}
    k = 1
    while level:
        counts.update((frozenset(s), bits.bit_count()) for s, bits in level.items())
        if max_size is not None and k >= max_size:
            break
        keys = sorted(level)
        nxt = {}
        for i, a in enumerate(keys):
            prefix = a[:-1]
            for b in keys[i + 1:]:
                if b[:-1] != prefix:
                    break
                cand = a + (b[-1],)
                bits = level[a] & level[b]
                if bits.bit_count() < min_count:
                    continue
                # apriori prune: every k-subset must itself be frequent
                if k > 1 and any(sub not in level for sub in combinations(cand, k)):
                    continue
                nxt[cand] = bits
        level = nxt
        k += 1
    return counts


def mine_frequent_itemsets(transactions: Sequence[Transaction], support, max_size: Optional[int] = None) -> dict:
    """Map every frequent itemset (label items included) to its support.

    An itemset is frequent when it occurs in at least
    ``max(1, ceil(support * n))`` of the ``n`` transactions.
    """
    transactions = list(transactions)
    n = len(transactions)
    return {s: c / n for s, c in _frequent_counts(transactions, support, max_size).items()}


def modified_apriori(transactions: Sequence[Transaction], support, config: MinerConfig = MinerConfig()) -> list:
    """Rules ``metadata items -> control level`` mined at one support threshold.

    Only itemsets holding exactly one control-level item become rules.  For
    each antecedent the single most confident consequent survives (ties go
    to the more severe level), and only if it reaches ``min_confidence``.
    """
    transactions = list(transactions)
    _check_labeled(transactions)
    counts = _frequent_counts(transactions, support, config.max_antecedent_size + 1)
    return _rules_from_counts(counts, len(transactions), min_support_count(support, len(transactions)), config)


def _check_labeled(transactions):
    if not transactions:
        raise EmptyCorpus("cannot mine an empty transaction set")
    for i, t in enumerate(transactions):
        if t.label is None:
            raise MissingLabels(f"transaction {i} has no control-level label")


def _rules_from_counts(counts: dict, n: int, min_count: int, config: MinerConfig) -> list:
    best = {}
    for itemset, count in counts.items():
        if count < min_count:
            continue
        labels = [it for it in itemset if it[0] == LABEL_ATTRIBUTE]
        if len(labels) != 1:
            continue
        antecedent = itemset - set(labels)
        if not antecedent:
            continue
        level = ControlLevel.parse(labels[0][1])
        # antecedent is frequent by downward closure, so its count is known
        confidence = count / counts[antecedent]
        if confidence < config.min_confidence:
            continue
        cur = best.get(antecedent)
        if cur is None or (confidence, int(level)) > (cur[1], int(cur[0])):
            best[antecedent] = (level, confidence, count)

    rules = [Rule(ant, level, count / n, conf) for ant, (level, conf, count) in best.items()]
    rules.sort(key=lambda r: r.key)
    return rules


def sweep_supports(n: int, n_supports: int) -> list:
    """Support thresholds ``i / n`` for ``i = 0..n_supports``."""
    return [Fraction(i, n) for i in range(int(n_supports) + 1)]


def generate_rules(transactions: Sequence[Transaction], config: MinerConfig = MinerConfig(),
                   weights: Optional[WeightVector] = None, version: int = 1) -> RuleSet:
    """Mine at supports ``0/n, 1/n, ..., N/n`` and merge into one RuleSet.

    A rule found at several thresholds is kept once, with the largest
    support observed.
    """
    transactions = list(transactions)
    _check_labeled(transactions)
    n = len(transactions)
    # one pass at the lowest threshold; higher sweeps are exact count filters of it
    supports = sweep_supports(n, config.n_supports)
    counts = _frequent_counts(transactions, supports[0], config.max_antecedent_size + 1)
    merged = {}
    for sup in supports:
        floor = min_support_count(sup, n)
        for rule in _rules_from_counts(counts, n, floor, config):
            key = (rule.antecedent, rule.consequent)
            cur = merged.get(key)
            if cur is None or rule.support > cur.support:
                merged[key] = rule
    return RuleSet(
        rules=tuple(merged.values()),
        weights=weights if weights is not None else WeightVector(),
        version=version,
        provenance=config.snapshot(),
    )


# --------------------------------------------------------------------------
# serialization
# --------------------------------------------------------------------------


def ruleset_to_dict(ruleset: RuleSet) -> dict:
    prov = dict(ruleset.provenance)
    return {
        "version": ruleset.version,
        "weights": dict(ruleset.weights),
        "provenance": prov,
        "rules": [
            {
                "antecedent": sorted(format_item(i) for i in r.antecedent),
                "consequent": r.consequent.label,
                "support": r.support,
                "confidence": r.confidence,
            }
            for r in ruleset.rules
        ],
    }


def ruleset_from_dict(doc: dict) -> RuleSet:
    try:
        rules = tuple(
            Rule(frozenset(parse_item(t) for t in r["antecedent"]), ControlLevel.parse(r["consequent"]),
                 float(r["support"]), float(r["confidence"]))
            for r in doc.get("rules", [])
        )
        return RuleSet(rules, WeightVector(doc.get("weights")), int(doc.get("version", 1)),
                       doc.get("provenance", {}))
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"bad rule set document: {exc}") from None


def dumps_ruleset(ruleset: RuleSet) -> str:
    return json.dumps(ruleset_to_dict(ruleset), indent=2) + "\n"


def save_ruleset(ruleset: RuleSet, path) -> None:
    Path(path).write_text(dumps_ruleset(ruleset), encoding="utf-8")


def load_ruleset(path) -> RuleSet:
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    if not text.strip():
        return RuleSet(())
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, line=exc.lineno, path=str(path)) from None
    if not isinstance(doc, dict):
        raise ParseError("rule set must be a JSON object", path=str(path))
    try:
        return ruleset_from_dict(doc)
    except ParseError as exc:
        raise ParseError(exc.reason, path=str(path)) from None
