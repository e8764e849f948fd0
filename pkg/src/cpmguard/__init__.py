"""Conversation privacy control engine.

Extract contextual metadata from speaker-tagged transcripts, mine
association rules from metadata to control levels, predict a control level
per conversation, and gate disclosure to a given querier.
"""

from .core import (
    ATTRIBUTES,
    ContextInfo,
    ControlLevel,
    ControlTally,
    ConversationRecord,
    Detail,
    LocationClass,
    MetadataTuple,
    People,
    RelationshipClass,
    Rule,
    RuleSet,
    Sentiment,
    Utterance,
    WeightVector,
)
from .extractors import MetadataExtractor, extract_metadata
from .gate import Action, DisclosureDecision, TrustGroupConfig, decide_disclosure
from .inference import RuleVotingClassifier, explain, predict, score_controls
from .miner import MinerConfig, Transaction, generate_rules, mine_frequent_itemsets, modified_apriori
from .phrasematch import Phrasebook, detect_privacy_indication, similarity

__version__ = "0.1.0"

__all__ = [
    "ATTRIBUTES",
    "Action",
    "ContextInfo",
    "ControlLevel",
    "ControlTally",
    "ConversationRecord",
    "Detail",
    "DisclosureDecision",
    "LocationClass",
    "MetadataExtractor",
    "MetadataTuple",
    "MinerConfig",
    "People",
    "Phrasebook",
    "RelationshipClass",
    "Rule",
    "RuleSet",
    "RuleVotingClassifier",
    "Sentiment",
    "Transaction",
    "TrustGroupConfig",
    "Utterance",
    "WeightVector",
    "decide_disclosure",
    "detect_privacy_indication",
    "explain",
    "extract_metadata",
    "generate_rules",
    "mine_frequent_itemsets",
    "modified_apriori",
    "predict",
    "score_controls",
    "similarity",
]
