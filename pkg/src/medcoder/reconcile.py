"""Code reconciliation: drop mutually exclusive / redundant codes, order the rest.

Only excludes1 notes remove codes (guideline semantics: excludes2 targets may
legitimately coexist). code_first / use_additional notes never change
membership; they only adjust the final ordering.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import Iterable, Mapping, Optional, Sequence

from .errors import UnknownCode
from .ontology import Ontology, canonical_code

REASON_EXCLUDES1 = "excludes1_conflict"
REASON_ANCESTOR = "ancestor_redundant"
REASON_DUPLICATE = "duplicate"
REASON_RESTRICTION = "outside_restriction"


@dataclass(frozen=True)
class DroppedCode:
    code: str
    reason: str
    conflicting_with: Optional[str] = None


@dataclass(frozen=True)
class ReconciliationDecision:
    kept: tuple[str, ...]
    dropped: tuple[DroppedCode, ...]


def _self_and_ancestors(o: Ontology, code: str) -> tuple[str, ...]:
    """Base entry and its ancestor chain; a seventh-char extension also counts
    its base code as an ancestor-or-self."""
    resolved = o.resolve_code(code)
    if resolved is None:
        raise UnknownCode(code)
    entry, _ = resolved
    return (entry.code, *o.ancestors(entry.code))


def _excludes1_targets(o: Ontology, chain: Iterable[str]) -> frozenset[str]:
    targets: set[str] = set()
    for c in chain:
        for note in o.get_code(c).notes:
            if note.kind == "excludes1":
                targets |= note.resolved
    return frozenset(targets)


def reconcile(
    o: Ontology,
    candidates: Sequence[str],
    restriction: Optional[Iterable[str]] = None,
    positions: Optional[Mapping[str, int]] = None,
) -> ReconciliationDecision:
    """Reconcile candidate codes for one encounter.

    ``positions`` maps canonical codes to their first evidence offset in the
    source text and drives the final ordering (ties by code). Membership of
    the output is independent of candidate order.
    """
    distinct: list[str] = []
    seen: set[str] = set()
    for cand in candidates:
        c = canonical_code(cand)
        if o.resolve_code(c) is None:
            raise UnknownCode(c)
        if c not in seen:
            seen.add(c)
            distinct.append(c)
    distinct.sort()

    dropped: list[DroppedCode] = []
    chains = {c: _self_and_ancestors(o, c) for c in distinct}
    anc_or_self = {c: frozenset(chains[c]) | {c} for c in distinct}

    # Strict ancestors of another candidate are redundant.
    survivors = []
    for c in distinct:
        descendants = [d for d in distinct if d != c and c in anc_or_self[d] - {d}]
        if descendants:
            keepers = [
                d
                for d in descendants
                if not any(x != d and d in anc_or_self[x] - {x} for x in distinct)
            ]
            dropped.append(
                DroppedCode(c, REASON_ANCESTOR, conflicting_with=min(keepers or descendants))
            )
        else:
            survivors.append(c)

    # Mutual exclusion via excludes1: the note carrier survives; mutual
    # exclusion in both directions keeps the lexicographically smaller code.
    excl = {c: _excludes1_targets(o, chains[c]) for c in survivors}
    kept = list(survivors)
    alive = set(kept)
    for i, a in enumerate(survivors):
        if a not in alive:
            continue
        for b in survivors[i + 1 :]:
            if b not in alive or a not in alive:
                continue
            a_excl_b = bool(excl[a] & anc_or_self[b])
            b_excl_a = bool(excl[b] & anc_or_self[a])
            if not (a_excl_b or b_excl_a):
                continue
            if a_excl_b and b_excl_a:
                winner, loser = (a, b) if a < b else (b, a)
            elif a_excl_b:
                winner, loser = a, b
            else:
                winner, loser = b, a
            alive.discard(loser)
            dropped.append(DroppedCode(loser, REASON_EXCLUDES1, conflicting_with=winner))
    kept = [c for c in kept if c in alive]

    if restriction is not None:
        allowed = {canonical_code(r) for r in restriction}
        still = []
        for c in kept:
            if c in allowed:
                still.append(c)
            else:
                dropped.append(DroppedCode(c, REASON_RESTRICTION))
        kept = still

    kept = _order_kept(o, kept, chains, anc_or_self, positions or {})
    return ReconciliationDecision(kept=tuple(kept), dropped=tuple(dropped))


def _order_kept(
    o: Ontology,
    kept: list[str],
    chains: Mapping[str, tuple[str, ...]],
    anc_or_self: Mapping[str, frozenset],
    positions: Mapping[str, int],
) -> list[str]:
    """First-evidence order, then code; code_first targets float above their
    note carrier and use_additional targets sink below it."""
    base = sorted(kept, key=lambda c: (positions.get(c, 1 << 60), c))
    rank = {c: i for i, c in enumerate(base)}

    after: dict[str, set[str]] = {c: set() for c in base}  # edge u -> v: u precedes v
    indeg = {c: 0 for c in base}
    for c in base:
        for anc in chains[c]:
            for note in o.get_code(anc).notes:
                if note.kind not in ("code_first", "use_additional"):
                    continue
                for other in base:
                    if other == c or not (note.resolved & anc_or_self[other]):
                        continue
                    u, v = (other, c) if note.kind == "code_first" else (c, other)
                    if v not in after[u]:
                        after[u].add(v)
                        indeg[v] += 1

    heap = [rank[c] for c in base if indeg[c] == 0]
    heapq.heapify(heap)
    ordered: list[str] = []
    while heap:
        c = base[heapq.heappop(heap)]
        ordered.append(c)
        for v in after[c]:
            indeg[v] -= 1
            if indeg[v] == 0:
                heapq.heappush(heap, rank[v])
    if len(ordered) < len(base):  # note cycle: fall back to evidence order
        ordered.extend(c for c in base if c not in set(ordered))
    return ordered
