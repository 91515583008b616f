"""End-to-end coding pipeline for one encounter text.

extraction -> per-mention index navigation -> tabular validation ->
reconciliation over the union. Every kept code carries the union of evidence
spans of the mentions that led to it plus a per-stage trace, so downstream
reviewers can audit each decision. Deterministic under the lexicon annotator:
repeated runs serialize to identical bytes.
"""

from __future__ import annotations

import json
import weakref
from dataclasses import dataclass, field
from typing import Optional, Sequence

import httpx

from .extraction import (
    AnnotatorConfig,
    Lexicon,
    Mention,
    build_lexicon,
    extract_mentions,
    extract_mentions_external,
)
from .index_nav import IndexHit, navigate_index
from .ontology import Ontology, display_code
from .reconcile import reconcile
from .tabular import ValidatedCode, validate_tabular

NOTE_SEPARATOR = "\n\n===== {note_type} =====\n\n"


@dataclass(frozen=True)
class EvidenceSpan:
    start: int
    end: int
    text: str


@dataclass(frozen=True)
class CodedResult:
    code: str  # canonical
    evidence: tuple[EvidenceSpan, ...]
    confidence: float
    trace: dict = field(compare=False)


@dataclass(frozen=True)
class PipelineConfig:
    mode: str = "full"  # "full" | "restricted"
    restriction: Optional[frozenset[str]] = None
    annotator: AnnotatorConfig = field(default_factory=AnnotatorConfig)
    top_k_hits: int = 1
    keep_negated: bool = False

    def __post_init__(self):
        if self.mode not in ("full", "restricted"):
            raise ValueError(f"unknown pipeline mode {self.mode!r}")
        if self.mode == "restricted" and not self.restriction:
            raise ValueError("restricted mode requires a non-empty restriction set")
        if self.top_k_hits < 1:
            raise ValueError("top_k_hits must be positive")


_lexicon_cache: dict[int, tuple[weakref.ref, Lexicon]] = {}


def lexicon_for(o: Ontology) -> Lexicon:
    """Memoized lexicon per ontology instance."""
    hit = _lexicon_cache.get(id(o))
    if hit is not None and hit[0]() is o:
        return hit[1]
    lex = build_lexicon(o)
    key = id(o)
    _lexicon_cache[key] = (weakref.ref(o, lambda _: _lexicon_cache.pop(key, None)), lex)
    return lex


@dataclass(frozen=True)
class _Route:
    mention: Mention
    hit: IndexHit
    validated: ValidatedCode


def code_encounter(
    o: Ontology,
    text: str,
    cfg: PipelineConfig,
    client: httpx.Client | None = None,
) -> list[CodedResult]:
    """Code one encounter text; un-codeable text yields []."""
    if not text:
        raise ValueError("text must be non-empty")
    if cfg.annotator.mode == "external":
        mentions = extract_mentions_external(text, cfg.annotator, client=client)
    else:
        mentions = extract_mentions(text, lexicon_for(o), cfg.annotator)
    if not cfg.keep_negated:
        mentions = [m for m in mentions if not m.negated]

    routes: list[_Route] = []
    for m in mentions:
        for hit in navigate_index(o, m)[: cfg.top_k_hits]:
            validated = validate_tabular(o, hit.location, list(m.qualifiers))
            routes.append(_Route(mention=m, hit=hit, validated=validated))
    if not routes:
        return []

    positions: dict[str, int] = {}
    for r in routes:
        positions.setdefault(r.validated.code, r.mention.start)
        positions[r.validated.code] = min(positions[r.validated.code], r.mention.start)

    restriction = cfg.restriction if cfg.mode == "restricted" else None
    decision = reconcile(o, [r.validated.code for r in routes], restriction, positions)

    displaced: dict[str, list[str]] = {}
    for d in decision.dropped:
        if d.conflicting_with is not None:
            displaced.setdefault(d.conflicting_with, []).append(f"{d.code}:{d.reason}")

    results: list[CodedResult] = []
    for code in decision.kept:
        contributing = [r for r in routes if r.validated.code == code]
        spans = sorted({(r.mention.start, r.mention.end) for r in contributing})
        best = min(
            contributing, key=lambda r: (-r.hit.score, r.mention.start, r.mention.end)
        )
        note = "kept"
        if code in displaced:
            note += "; displaced " + ", ".join(sorted(displaced[code]))
        results.append(
            CodedResult(
                code=code,
                evidence=tuple(
                    EvidenceSpan(start=s, end=e, text=text[s:e]) for s, e in spans
                ),
                confidence=max(r.hit.score for r in contributing),
                trace={
                    "mention": best.mention.to_dict(),
                    "index_hit": {
                        "location": best.hit.location,
                        "matched_lead": best.hit.matched_lead,
                        "matched_path": list(best.hit.matched_path),
                        "score": best.hit.score,
                    },
                    "validated": {
                        "code": best.validated.code,
                        "path": list(best.validated.path),
                        "applied_seventh": best.validated.applied_seventh,
                    },
                    "reconciliation_note": note,
                },
            )
        )
    return results


# -- encounter assembly ------------------------------------------------------


@dataclass(frozen=True)
class AssembledEncounter:
    text: str
    offsets: tuple[int, ...]  # start offset of each note's text


def assemble_encounter(notes: Sequence[dict]) -> AssembledEncounter:
    """Concatenate encounter notes into one document with typed separators."""
    if not notes:
        raise ValueError("at least one note is required")
    parts: list[str] = []
    offsets: list[int] = []
    pos = 0
    for note in notes:
        header = NOTE_SEPARATOR.format(note_type=note["note_type"])
        parts.append(header)
        pos += len(header)
        offsets.append(pos)
        body = note["text"]
        parts.append(body)
        pos += len(body)
    return AssembledEncounter(text="".join(parts), offsets=tuple(offsets))


# -- wire format -------------------------------------------------------------


def prediction_record(encounter_id: str, results: Sequence[CodedResult]) -> dict:
    """One-encounter prediction document (codes in display form)."""
    return {
        "id": encounter_id,
        "results": [
            {
                "code": display_code(r.code),
                "confidence": r.confidence,
                "evidence": [
                    {"start": s.start, "end": s.end, "text": s.text} for s in r.evidence
                ],
                "trace": r.trace,
            }
            for r in results
        ],
    }


def canonical_json(doc: dict) -> bytes:
    """Stable byte serialization: sorted keys, tight separators, ASCII."""
    return json.dumps(doc, sort_keys=True, separators=(",", ":"), ensure_ascii=True).encode(
        "utf-8"
    )
