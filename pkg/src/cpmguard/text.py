"""Tokenization shared by the extractors and the phrase matcher."""

import string

_STRIP = string.punctuation + "\u2018\u2019\u201c\u201d\u2026\u2013\u2014"


def tokenize(text: str) -> list:
    """Lowercase, split on whitespace, strip leading/trailing punctuation.

    Tokens that are nothing but punctuation are dropped.  Inner punctuation
    survives, so ``"Don't"`` becomes ``"don't"``.
    """
    out = []
    for raw in text.lower().split():
        tok = raw.strip(_STRIP)
        if tok:
            out.append(tok)
    return out
