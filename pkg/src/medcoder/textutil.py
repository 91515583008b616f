"""Deterministic, locale-free text primitives shared by extraction and metrics.

Tokens are maximal runs of letters/digits (underscore counts as punctuation);
sentences end at ``. ! ?`` followed by whitespace.
"""

from __future__ import annotations

import re

# Unicode letters and digits; underscore is treated as punctuation.
_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)
_SENT_BREAK_RE = re.compile(r"[.!?](?=\s)")


def token_spans(text: str) -> list[tuple[int, int]]:
    """Half-open [start, end) character spans of every token, in order."""
    return [m.span() for m in _TOKEN_RE.finditer(text)]


def tokenize(text: str) -> list[str]:
    """Lowercased token strings of ``text``."""
    return [m.group(0).lower() for m in _TOKEN_RE.finditer(text)]


def normalize(term: str) -> str:
    """Lowercase, strip punctuation, collapse whitespace to single spaces."""
    return " ".join(tokenize(term))


def sentence_index(text: str) -> list[int]:
    """Sentence ordinal for every character position of ``text``."""
    ids = [0] * len(text)
    sent = 0
    last = 0
    for m in _SENT_BREAK_RE.finditer(text):
        end = m.end()
        for i in range(last, end):
            ids[i] = sent
        sent += 1
        last = end
    for i in range(last, len(text)):
        ids[i] = sent
    return ids
