"""Command-line interface.

    cpmguard train     --corpus C --ruleset R [--train-count K --seed S]
    cpmguard predict   --ruleset R TRANSCRIPT [--context CTX] [--explain]
    cpmguard explain   --ruleset R TRANSCRIPT [--context CTX]
    cpmguard evaluate  --corpus C --ruleset R [--train-count K --seed S]
    cpmguard gate      --corpus C --ruleset R --groups G CONVERSATION_ID QUERIER
    cpmguard feedback  --corpus C --ruleset R TRANSCRIPT [--context CTX]

Machine-readable output is JSON on stdout; diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .core import ContextInfo, ConversationRecord, RuleSet, Utterance, WeightVector
from .corpus import (
    LabelThresholds,
    context_from_dict,
    evaluate,
    ingest_feedback,
    load_corpus,
    record_from_dict,
    save_corpus,
    split,
    training_data,
)
from .exceptions import CpmGuardError, MissingLabels, ParseError, UnknownConversation
from .extractors import MetadataExtractor, SentimentLexicon, TopicTaxonomy
from .gate import TrustGroupConfig, decide_disclosure
from .inference import FULL, MATCH_MODES, explain, predict
from .miner import MinerConfig, dumps_ruleset, generate_rules, load_ruleset, to_transactions
from .phrasematch import DEFAULT_THRESHOLD, Phrasebook, detect_privacy_indication

log = logging.getLogger("cpmguard")


@dataclass
class CliConfig:
    corpus: Optional[Path] = None
    ruleset: Optional[Path] = None
    groups: Optional[TrustGroupConfig] = None
    extractor: MetadataExtractor = field(default_factory=MetadataExtractor)
    miner: MinerConfig = field(default_factory=MinerConfig)
    weights: WeightVector = field(default_factory=WeightVector)
    thresholds: Optional[LabelThresholds] = None
    seed: int = 0
    train_count: Optional[int] = None
    match_mode: str = FULL

    @classmethod
    def from_args(cls, args) -> "CliConfig":
        """Load and validate every referenced resource before any work starts."""
        lexicon = SentimentLexicon.load(args.lexicon) if args.lexicon else None
        taxonomy = TopicTaxonomy.load(args.taxonomy) if args.taxonomy else None
        phrasebook = (Phrasebook.load(args.phrasebook, args.phrase_threshold) if args.phrasebook
                      else Phrasebook.default(args.phrase_threshold))
        extractor = MetadataExtractor(lexicon, taxonomy, phrasebook).fit()
        groups = TrustGroupConfig.load(args.groups) if getattr(args, "groups", None) else None
        corpus = getattr(args, "corpus", None)
        if corpus is not None and not Path(corpus).is_file():
            raise FileNotFoundError(f"corpus file not found: {corpus}")
        return cls(
            corpus=Path(corpus) if corpus else None,
            ruleset=Path(args.ruleset) if getattr(args, "ruleset", None) else None,
            groups=groups,
            extractor=extractor,
            miner=MinerConfig(args.n_supports, args.min_confidence, args.max_antecedent_size),
            weights=_parse_weights(args.weights),
            thresholds=LabelThresholds.parse(args.thresholds) if args.thresholds else None,
            seed=args.seed,
            train_count=args.train_count,
            match_mode=args.match_mode,
        )

    def load_ruleset(self) -> RuleSet:
        if self.ruleset is None:
            raise ValueError("--ruleset is required")
        return load_ruleset(self.ruleset)


def _parse_weights(text: Optional[str]) -> WeightVector:
    if not text:
        return WeightVector()
    weights = {}
    for part in text.split(","):
        name, sep, value = part.partition("=")
        if not sep:
            raise ValueError(f"--weights entries look like attr=value, got {part!r}")
        weights[name.strip()] = float(value)
    return WeightVector(weights)


def read_transcript(path, context_path=None) -> ConversationRecord:
    """Load a conversation from a JSON record, or from ``speaker: text`` lines
    plus a JSON context file."""
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    if path.suffix in (".json", ".jsonl"):
        try:
            doc = json.loads(text.strip().splitlines()[0] if path.suffix == ".jsonl" else text)
        except (json.JSONDecodeError, IndexError) as exc:
            raise ParseError(str(exc), path=str(path)) from None
        return record_from_dict(doc)

    utts = []
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        speaker, sep, said = line.partition(":")
        if not sep or not speaker.strip():
            raise ParseError("expected 'speaker: text'", line=lineno, path=str(path))
        utts.append(Utterance(speaker.strip(), said.strip()))
    if not utts:
        raise ParseError("transcript has no utterances", path=str(path))
    if context_path is None:
        context = ContextInfo(frozenset(u.speaker for u in utts))
    else:
        try:
            ctx_doc = json.loads(Path(context_path).read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ParseError(exc.msg, line=exc.lineno, path=str(context_path)) from None
        context = context_from_dict(ctx_doc)
    return ConversationRecord(path.stem, tuple(utts), context)


def _emit(obj) -> None:
    sys.stdout.write(json.dumps(obj, indent=2) + "\n")


def _labeled(corpus, cfg: CliConfig):
    X, y = training_data(corpus, cfg.extractor, cfg.thresholds)
    missing = [s.id for s, lvl in zip(corpus, y) if lvl is None]
    if missing:
        hint = "" if cfg.thresholds else " (pass --thresholds to label from responses)"
        raise MissingLabels(f"{len(missing)} scenario(s) without a label, e.g. {missing[0]!r}{hint}")
    return X, y


def _train(corpus, cfg: CliConfig, version: int = 1) -> RuleSet:
    X, y = _labeled(corpus, cfg)
    return generate_rules(to_transactions(X, y), cfg.miner, cfg.weights, version)


def _train_split(corpus, cfg: CliConfig):
    if cfg.train_count is None:
        return corpus, []
    return split(corpus, cfg.seed, cfg.train_count)


# --------------------------------------------------------------------------
# subcommands
# --------------------------------------------------------------------------


def cmd_train(cfg: CliConfig, args) -> int:
    if cfg.ruleset is None:
        raise ValueError("--ruleset is required")
    corpus = load_corpus(cfg.corpus)
    train, test = _train_split(corpus, cfg)
    ruleset = _train(train, cfg)
    cfg.ruleset.write_text(dumps_ruleset(ruleset), encoding="utf-8")
    log.info("wrote %d rules to %s", len(ruleset), cfg.ruleset)
    _emit({
        "ruleset": str(cfg.ruleset),
        "version": ruleset.version,
        "train_size": len(train),
        "test_size": len(test),
        "rules": len(ruleset),
        "per_level": ruleset.level_counts(),
    })
    return 0


def _predict_payload(cfg: CliConfig, record: ConversationRecord, with_explanation: bool) -> dict:
    ruleset = cfg.load_ruleset()
    sample = cfg.extractor.extract(record)
    exp = explain(sample, ruleset, cfg.match_mode)
    out = {"id": record.id, "level": exp.predicted.label, "overridden": exp.overridden,
           "metadata": sample.to_dict()}
    if with_explanation:
        out["explanation"] = exp.to_dict()
    return out


def cmd_predict(cfg: CliConfig, args) -> int:
    record = read_transcript(args.transcript, args.context)
    _emit(_predict_payload(cfg, record, args.explain))
    return 0


def cmd_explain(cfg: CliConfig, args) -> int:
    record = read_transcript(args.transcript, args.context)
    _emit(_predict_payload(cfg, record, True)["explanation"])
    return 0


def cmd_evaluate(cfg: CliConfig, args) -> int:
    corpus = load_corpus(cfg.corpus)
    _, test = _train_split(corpus, cfg)
    scenarios = test if cfg.train_count is not None else corpus
    report = evaluate(cfg.load_ruleset(), scenarios, cfg.extractor, cfg.thresholds, cfg.match_mode)
    _emit(report.to_dict())
    sys.stderr.write(report.to_table() + "\n")
    return 0


def cmd_gate(cfg: CliConfig, args) -> int:
    corpus = {s.id: s for s in load_corpus(cfg.corpus)}
    if args.conversation_id not in corpus:
        raise UnknownConversation(f"no conversation {args.conversation_id!r} in {cfg.corpus}")
    scenario = corpus[args.conversation_id]
    sample = scenario.metadata or cfg.extractor.extract(scenario.record)
    level = predict(sample, cfg.load_ruleset(), cfg.match_mode)
    decision = decide_disclosure(scenario.record, level, args.querier, cfg.groups or TrustGroupConfig({}))
    _emit({"conversation": scenario.id, "querier": args.querier, "level": level.label,
           **decision.to_dict()})
    return 0


def cmd_feedback(cfg: CliConfig, args) -> int:
    record = read_transcript(args.transcript, args.context)
    match = detect_privacy_indication(record, cfg.extractor.phrasebook_)
    if match is None:
        _emit({"ingested": False, "id": record.id})
        return 0
    corpus = load_corpus(cfg.corpus)
    corpus = ingest_feedback(corpus, record, match, cfg.extractor)
    previous = load_ruleset(cfg.ruleset).version if cfg.ruleset and cfg.ruleset.is_file() else 0
    ruleset = _train(corpus, cfg, version=previous + 1)
    save_corpus(corpus, cfg.corpus)
    if cfg.ruleset is not None:
        cfg.ruleset.write_text(dumps_ruleset(ruleset), encoding="utf-8")
    _emit({
        "ingested": True,
        "id": record.id,
        "match": {"utterance_index": match.utterance_index, "phrase": match.phrase,
                  "similarity": match.similarity},
        "corpus_size": len(corpus),
        "version": ruleset.version,
        "rules": len(ruleset),
    })
    return 0


# --------------------------------------------------------------------------
# argument parsing
# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--ruleset", help="rule set JSON (written by train/feedback, read otherwise)")
    common.add_argument("--lexicon", help="sentiment lexicon TSV (default: bundled)")
    common.add_argument("--taxonomy", help="topic taxonomy JSON (default: bundled)")
    common.add_argument("--phrasebook", help="privacy phrasebook text file (default: bundled)")
    common.add_argument("--phrase-threshold", type=float, default=DEFAULT_THRESHOLD)
    common.add_argument("--thresholds", help="privacy-score label thresholds 'low,mod', e.g. 2.3,3.1")
    common.add_argument("--n-supports", type=int, default=0, help="support sweep 0/n .. N/n")
    common.add_argument("--min-confidence", type=float, default=0.5)
    common.add_argument("--max-antecedent-size", type=int, default=7)
    common.add_argument("--weights", help="per-attribute vote weights, e.g. sentiment=2,topic=0.5")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--train-count", type=int)
    common.add_argument("--match-mode", choices=MATCH_MODES, default=FULL)
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="cpmguard", description=__doc__.splitlines()[0] if __doc__ else None)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", parents=[common], help="mine a rule set from a labeled corpus")
    p.add_argument("--corpus", required=True)
    p.set_defaults(func=cmd_train)

    for name, func, help_ in (("predict", cmd_predict, "predict a conversation's control level"),
                              ("explain", cmd_explain, "show the rule votes behind a prediction"),
                              ("feedback", cmd_feedback, "ingest a privacy request and re-mine")):
        p = sub.add_parser(name, parents=[common], help=help_)
        p.add_argument("transcript", help="record JSON, or 'speaker: text' lines")
        p.add_argument("--context", help="context JSON for plain-text transcripts")
        if name == "predict":
            p.add_argument("--explain", action="store_true")
        if name == "feedback":
            p.add_argument("--corpus", required=True)
        p.set_defaults(func=func)

    p = sub.add_parser("evaluate", parents=[common], help="accuracy and confusion matrix")
    p.add_argument("--corpus", required=True)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("gate", parents=[common], help="disclosure decision for a querier")
    p.add_argument("--corpus", required=True, help="conversation store (corpus JSONL)")
    p.add_argument("--groups", help="trust groups JSON")
    p.add_argument("conversation_id")
    p.add_argument("querier")
    p.set_defaults(func=cmd_gate)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s", stream=sys.stderr)
    try:
        cfg = CliConfig.from_args(args)
        return args.func(cfg, args)
    except (CpmGuardError, OSError, ValueError) as exc:
        sys.stderr.write(f"error: {type(exc).__name__}: {exc}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
