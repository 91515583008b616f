"""Alphabetic-index navigation: map an extracted mention to hierarchy locations.

Lead terms are resolved exactly first, then fuzzily (Damerau-Levenshtein
distance <= 2). From the lead, the deepest modifier path whose labels are all
among the mention's qualifiers is followed; the reached node's code (or the
nearest coded ancestor on the path, or the lead's default code) becomes the
candidate location. ``see_also`` references are chased at most one step.
"""

from __future__ import annotations

from dataclasses import dataclass

from .extraction import Mention
from .ontology import IndexEntry, ModifierNode, Ontology

MAX_FUZZY_DISTANCE = 2


def damerau_levenshtein(a: str, b: str) -> int:
    """Edit distance counting insert, delete, substitute, and adjacent swap."""
    if a == b:
        return 0
    la, lb = len(a), len(b)
    if la == 0:
        return lb
    if lb == 0:
        return la
    prev2: list[int] = []
    prev = list(range(lb + 1))
    for i in range(1, la + 1):
        cur = [i] + [0] * lb
        for j in range(1, lb + 1):
            cost = 0 if a[i - 1] == b[j - 1] else 1
            cur[j] = min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + cost)
            if i > 1 and j > 1 and a[i - 1] == b[j - 2] and a[i - 2] == b[j - 1]:
                cur[j] = min(cur[j], prev2[j - 2] + 1)
        prev2, prev = prev, cur
    return prev[lb]


def score_hit(exact_lead: bool, consumed: int, total_qualifiers: int, edit_distance: int) -> float:
    """Deterministic candidate-ordering score in [0, 1].

    score = lead factor x qualifier factor, where the lead factor is 1 for an
    exact lead match and 1/(1+d) for a fuzzy one, and the qualifier factor is
    (1+consumed)/(1+total). 1.0 iff exact lead and every qualifier consumed.
    """
    if consumed > total_qualifiers:
        raise ValueError("consumed qualifiers exceed total")
    lead_factor = 1.0 if exact_lead else 1.0 / (1.0 + edit_distance)
    return lead_factor * ((1.0 + consumed) / (1.0 + total_qualifiers))


@dataclass(frozen=True)
class IndexHit:
    location: str  # canonical code, possibly non-billable
    matched_lead: str
    matched_path: tuple[str, ...]
    score: float


def _deepest_path(
    entry: IndexEntry, qualifiers: frozenset[str]
) -> tuple[tuple[str, ...], str | None]:
    """Deepest label path through ``entry`` consumable from ``qualifiers``.

    Returns (path labels, location code). The location is the code of the
    deepest node on the path that carries one, falling back to the entry's
    default code; None when no code exists anywhere on the path.
    """
    best_path: tuple[str, ...] = ()
    best_code = entry.default_code

    def walk(nodes: tuple[ModifierNode, ...], path: tuple[str, ...], code: str | None):
        nonlocal best_path, best_code
        for node in nodes:
            if node.label not in qualifiers:
                continue
            npath = path + (node.label,)
            ncode = node.code if node.code is not None else code
            # Deeper wins; equal depth keeps the lexicographically smaller path.
            if len(npath) > len(best_path) or (len(npath) == len(best_path) and npath < best_path):
                best_path, best_code = npath, ncode
            walk(node.children, npath, ncode)

    walk(entry.modifiers, (), entry.default_code)
    return best_path, best_code


def navigate_index(o: Ontology, m: Mention) -> list[IndexHit]:
    """Ranked candidate locations for a mention; [] when not indexable."""
    qualifiers = frozenset(m.qualifiers)
    total = len(m.qualifiers)

    exact = o.get_index_entry(m.normalized)
    if exact is not None:
        candidates = [(exact, True, 0)]
    else:
        candidates = []
        for lead in o.lead_terms():
            if abs(len(lead) - len(m.normalized)) > MAX_FUZZY_DISTANCE:
                continue
            d = damerau_levenshtein(m.normalized, lead)
            if d <= MAX_FUZZY_DISTANCE:
                candidates.append((o.get_index_entry(lead), False, d))

    hits: list[IndexHit] = []
    seen: set[tuple[str, str]] = set()
    for entry, exact_lead, dist in candidates:
        chased = 0
        while entry is not None:
            path, code = _deepest_path(entry, qualifiers)
            if code is not None and (code, entry.lead_term) not in seen:
                seen.add((code, entry.lead_term))
                # A repeated label along one tree path can consume the same
                # qualifier twice; clamp so the score precondition holds.
                consumed = min(len(path), total)
                hits.append(
                    IndexHit(
                        location=code,
                        matched_lead=entry.lead_term,
                        matched_path=path,
                        score=score_hit(exact_lead, consumed, total, dist),
                    )
                )
            if entry.see_also is None or chased >= 1:
                break
            chased += 1
            entry = o.get_index_entry(entry.see_also)

    hits.sort(key=lambda h: (-h.score, h.location, h.matched_lead))
    return hits
