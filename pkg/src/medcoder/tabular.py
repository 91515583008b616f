"""Tabular validation: descend from an index location to the most precise
billable code, applying seventh-character extension when the code family
requires one.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .errors import NoBillableDescendant, UnknownLocation
from .ontology import CodeEntry, Ontology, canonical_code
from .textutil import tokenize

UNSPECIFIED_MARKERS = ("unspecified", "without complications")


@dataclass(frozen=True)
class ValidatedCode:
    code: str  # canonical, seventh character applied when required
    path: tuple[str, ...]  # codes from the input location down to the leaf
    applied_seventh: Optional[str] = None


def _match_tokens(entry: CodeEntry) -> frozenset[str]:
    toks = set(tokenize(entry.title))
    for n in entry.notes:
        if n.kind == "inclusion_term" and n.text:
            toks.update(tokenize(n.text))
    return frozenset(toks)


def _prefers_unspecified(entry: CodeEntry) -> bool:
    title = entry.title.lower()
    return any(marker in title for marker in UNSPECIFIED_MARKERS)


def choose_child(children: list[CodeEntry], qualifier_tokens: frozenset[str]) -> CodeEntry:
    """Greedy step: the child sharing the most qualifier tokens wins.

    With no token overlap anywhere, "unspecified"-style children are the
    conservative default; remaining ties go to the smallest code.
    """
    scored = [(len(qualifier_tokens & _match_tokens(c)), c) for c in children]
    best = max(s for s, _ in scored)
    tied = [c for s, c in scored if s == best]
    if best == 0:
        tied.sort(key=lambda c: (not _prefers_unspecified(c), c.code))
    else:
        tied.sort(key=lambda c: c.code)
    return tied[0]


def apply_seventh_char(
    o: Ontology, leaf: CodeEntry, encounter_context: Optional[dict]
) -> tuple[str, Optional[str]]:
    """Extended code string and the applied character (None when no rule)."""
    rule = o.seventh_char_rule(leaf.code)
    if rule is None:
        return leaf.code, None
    episode = (encounter_context or {}).get("episode")
    char = None
    if episode is not None:
        for ch, meaning in rule.allowed.items():
            if meaning == episode:
                char = ch
                break
    if char is None:
        char = sorted(rule.allowed)[0]
    stem = leaf.code
    if len(stem) < 6:
        stem = stem + rule.placeholder * (6 - len(stem))
    return stem + char, char


def validate_tabular(
    o: Ontology,
    location: str,
    qualifiers: list[str] | tuple[str, ...] = (),
    encounter_context: Optional[dict] = None,
) -> ValidatedCode:
    """Most precise billable code reachable from ``location``.

    Deterministic in its inputs; see ``choose_child`` for the descent rule.
    """
    entry = o.get_code(location)
    if entry is None:
        raise UnknownLocation(canonical_code(location))
    qualifier_tokens = frozenset(
        tok for q in qualifiers for tok in tokenize(q)
    )
    path = [entry.code]
    while not entry.billable:
        children = o.children(entry.code)
        if not children:
            raise NoBillableDescendant(entry.code)
        entry = choose_child(children, qualifier_tokens)
        path.append(entry.code)
    code, seventh = apply_seventh_char(o, entry, encounter_context)
    return ValidatedCode(code=code, path=tuple(path), applied_seventh=seventh)
