"""Dataset ingestion and repeated end-to-end evaluation runs.

Datasets are JSON Lines, one encounter per line:
``{"id", "notes": [{"note_type", "text"}], "gold": [{"code", "spans"|null}],
"allowed_codes"|null}``. Gold spans index into the assembled encounter text
(see ``pipeline.assemble_encounter``).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

from .errors import ParseError, SpanOutOfBounds
from .metrics import (
    ConfusionCounts,
    accumulate,
    macro_prf,
    micro_prf,
    run_stats,
    span_alignment,
)
from .ontology import Ontology, canonical_code
from .pipeline import PipelineConfig, assemble_encounter, code_encounter


@dataclass(frozen=True)
class GoldCode:
    code: str  # canonical
    spans: Optional[tuple[tuple[int, int], ...]] = None


@dataclass(frozen=True)
class EncounterRecord:
    id: str
    notes: tuple[dict, ...]
    gold: tuple[GoldCode, ...]
    allowed_codes: Optional[frozenset[str]] = None

    @property
    def text(self) -> str:
        return assemble_encounter(list(self.notes)).text


def load_dataset(path: str | Path) -> list[EncounterRecord]:
    """Parse and validate a JSONL dataset; gold codes come back canonical."""
    records: list[EncounterRecord] = []
    seen_ids: set[str] = set()
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                doc = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(f"malformed dataset line: {exc.msg}", line=lineno) from exc
            try:
                enc_id = str(doc["id"])
                notes = [
                    {"note_type": str(n["note_type"]), "text": str(n["text"])}
                    for n in doc["notes"]
                ]
                raw_gold = doc.get("gold") or []
            except (KeyError, TypeError) as exc:
                raise ParseError(f"dataset record missing field: {exc}", line=lineno) from exc
            if not notes:
                raise ParseError(f"record {enc_id!r} has no notes", line=lineno)
            if enc_id in seen_ids:
                raise ParseError(f"duplicate encounter id {enc_id!r}", line=lineno)
            seen_ids.add(enc_id)

            text = assemble_encounter(notes).text
            gold: list[GoldCode] = []
            for g in raw_gold:
                spans = g.get("spans")
                if spans:  # an empty list means "no annotated spans"
                    parsed = []
                    for s in spans:
                        start, end = int(s[0]), int(s[1])
                        if not (0 <= start < end <= len(text)):
                            raise SpanOutOfBounds(
                                f"gold span [{start},{end}) out of bounds in {enc_id!r}"
                            )
                        parsed.append((start, end))
                    spans = tuple(parsed)
                else:
                    spans = None
                gold.append(GoldCode(code=canonical_code(g["code"]), spans=spans))
            allowed = doc.get("allowed_codes")
            records.append(
                EncounterRecord(
                    id=enc_id,
                    notes=tuple(notes),
                    gold=tuple(gold),
                    allowed_codes=frozenset(canonical_code(c) for c in allowed)
                    if allowed
                    else None,
                )
            )
    return records


def gold_union(records: Sequence[EncounterRecord]) -> frozenset[str]:
    return frozenset(g.code for r in records for g in r.gold)


def run_eval(
    o: Ontology,
    records: Sequence[EncounterRecord],
    cfg: PipelineConfig,
    runs: int = 1,
    mode: Optional[str] = None,
) -> dict:
    """Evaluate ``runs`` repeats of the pipeline over a dataset.

    ``mode`` overrides ``cfg.mode``; asking for restricted evaluation with no
    restriction on ``cfg`` derives one from the union of the dataset's gold
    codes (the usual predefined-subset convention). The report records
    whichever restriction applied.
    """
    if runs < 1:
        raise ValueError("runs must be >= 1")

    mode = mode or cfg.mode
    restriction_source = None
    effective_cfg = cfg
    if mode == "restricted":
        restriction_source = "config" if cfg.restriction else "gold_union"
        effective_cfg = PipelineConfig(
            mode="restricted",
            restriction=cfg.restriction or gold_union(records),
            annotator=cfg.annotator,
            top_k_hits=cfg.top_k_hits,
            keep_negated=cfg.keep_negated,
        )
    elif cfg.mode == "restricted":
        effective_cfg = PipelineConfig(
            mode="full",
            annotator=cfg.annotator,
            top_k_hits=cfg.top_k_hits,
            keep_negated=cfg.keep_negated,
        )

    has_gold_spans = any(g.spans for r in records for g in r.gold)
    micro_series: dict[str, list[float]] = {"p": [], "r": [], "f1": []}
    macro_series: dict[str, list[float]] = {"p": [], "r": [], "f1": []}
    span_series: dict[str, list[float]] = {}

    for _ in range(runs):
        acc = ConfusionCounts()
        preds_by_enc: dict[str, dict[str, list[tuple[int, int]]]] = {}
        golds_by_enc: dict[str, dict[str, Optional[list[tuple[int, int]]]]] = {}
        texts: dict[str, str] = {}
        for rec in records:
            text = assemble_encounter(list(rec.notes)).text
            results = code_encounter(o, text, effective_cfg)
            pred_codes = {res.code for res in results}
            gold_codes = {g.code for g in rec.gold}
            accumulate(gold_codes, pred_codes, acc)
            texts[rec.id] = text
            preds_by_enc[rec.id] = {
                res.code: [(s.start, s.end) for s in res.evidence] for res in results
            }
            golds_by_enc[rec.id] = {
                g.code: list(g.spans) if g.spans is not None else None for g in rec.gold
            }
        mi = micro_prf(acc)
        ma = macro_prf(acc)
        for key, val in (("p", mi.precision), ("r", mi.recall), ("f1", mi.f1)):
            micro_series[key].append(val)
        for key, val in (("p", ma.precision), ("r", ma.recall), ("f1", ma.f1)):
            macro_series[key].append(val)
        if has_gold_spans:
            rep = span_alignment(preds_by_enc, golds_by_enc, texts).to_dict()
            for key, val in rep.items():
                span_series.setdefault(key, []).append(val)

    report = {
        "setting": effective_cfg.mode,
        "runs": runs,
        "micro": {k: run_stats(v).to_dict() for k, v in micro_series.items()},
        "macro": {k: run_stats(v).to_dict() for k, v in macro_series.items()},
        "metadata": {
            "span_alignment_aggregation": "unweighted mean over true-positive codes",
            "restriction_source": restriction_source,
        },
    }
    if effective_cfg.restriction:
        report["restriction"] = sorted(effective_cfg.restriction)
    if has_gold_spans:
        report["span_alignment"] = {
            k: run_stats(v).to_dict() for k, v in span_series.items()
        }
    return report
