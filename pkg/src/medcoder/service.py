"""HTTP facade over the coding pipeline plus the human-review log.

Endpoints (JSON over HTTP/1.1):

* ``POST /v1/code``                      -> prediction record for a text
* ``GET  /v1/ontology/{system}/code/{code}`` -> code detail pane data
* ``POST /v1/review/ingest``             -> register an encounter for review
* ``GET  /v1/review`` / ``GET /v1/review/{id}`` -> review state
* ``POST /v1/review/{id}/decision``      -> append an accept/reject/replace
* ``GET  /healthz``

The review log is an append-only JSON Lines file; current state is always a
pure projection (last writer wins per code) over that log, so ingest-time
predictions stay reproducible even if the ontology is later swapped. A single
process-wide lock serializes appends; reads project from memory.
"""

from __future__ import annotations

import asyncio
import hashlib
import json
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, Request, Response

from .errors import ExternalUnavailable, MedcoderError
from .extraction import AnnotatorConfig
from .ontology import Ontology, canonical_code, display_code, load_ontology
from .pipeline import (
    PipelineConfig,
    assemble_encounter,
    canonical_json,
    code_encounter,
    prediction_record,
)

ACTIONS = ("accept", "reject", "replace")


@dataclass
class ServiceConfig:
    ontology_paths: list[str] = field(default_factory=list)
    default_system_id: Optional[str] = None
    annotator: AnnotatorConfig = field(default_factory=AnnotatorConfig)
    max_body_bytes: int = 1 << 20
    request_timeout: float = 30.0
    review_dir: str = "./review-data"
    ui_dir: Optional[str] = None


class ReviewStore:
    """Durable review state: encounters.jsonl + decisions.jsonl, replayed on start."""

    def __init__(self, directory: str | Path):
        self.dir = Path(directory)
        self.dir.mkdir(parents=True, exist_ok=True)
        self._enc_path = self.dir / "encounters.jsonl"
        self._dec_path = self.dir / "decisions.jsonl"
        self._lock = threading.Lock()
        self._encounters: dict[str, dict] = {}
        self._decisions: dict[str, list[dict]] = {}
        self._seq = 0
        self._replay()

    def _replay(self):
        if self._enc_path.exists():
            for line in self._enc_path.read_text(encoding="utf-8").splitlines():
                if line.strip():
                    doc = json.loads(line)
                    self._encounters[doc["id"]] = doc
        if self._dec_path.exists():
            for line in self._dec_path.read_text(encoding="utf-8").splitlines():
                if line.strip():
                    d = json.loads(line)
                    self._decisions.setdefault(d["encounter_id"], []).append(d)
                    self._seq = max(self._seq, d.get("seq", 0))

    def ingest(self, doc: dict):
        with self._lock:
            with open(self._enc_path, "a", encoding="utf-8") as fh:
                fh.write(json.dumps(doc, ensure_ascii=True) + "\n")
            self._encounters[doc["id"]] = doc

    def get(self, encounter_id: str) -> Optional[dict]:
        with self._lock:
            return self._encounters.get(encounter_id)

    def ids(self) -> list[str]:
        with self._lock:
            return sorted(self._encounters)

    def append_decision(self, encounter_id: str, decision: dict) -> list[dict]:
        with self._lock:
            self._seq += 1
            entry = {"encounter_id": encounter_id, "seq": self._seq,
                     "ts": time.time(), **decision}
            with open(self._dec_path, "a", encoding="utf-8") as fh:
                fh.write(json.dumps(entry, ensure_ascii=True) + "\n")
            self._decisions.setdefault(encounter_id, []).append(entry)
            return list(self._decisions[encounter_id])

    def decisions(self, encounter_id: str) -> list[dict]:
        with self._lock:
            return list(self._decisions.get(encounter_id, ()))

    @staticmethod
    def project(decisions: list[dict]) -> dict[str, dict]:
        """Last decision per code, in log order."""
        state: dict[str, dict] = {}
        for d in sorted(decisions, key=lambda d: d["seq"]):
            state[d["code"]] = {
                "action": d["action"],
                "replacement": d.get("replacement"),
                "reviewer": d.get("reviewer"),
                "seq": d["seq"],
            }
        return state


def _json_response(doc: dict, status: int = 200) -> Response:
    return Response(content=canonical_json(doc), status_code=status,
                    media_type="application/json")


def _error(status: int, message: str) -> Response:
    return _json_response({"error": message}, status=status)


def create_app(cfg: ServiceConfig) -> FastAPI:
    if not cfg.ontology_paths:
        raise ValueError("at least one ontology must be configured")
    ontologies: dict[str, Ontology] = {}
    for path in cfg.ontology_paths:
        fmt = "icd10cm_xml_adapter" if str(path).endswith((".xml", ".XML")) else "canonical_json"
        with open(path, "rb") as fh:
            o = load_ontology(fh, format=fmt)
        ontologies[o.system_id] = o
    default_system = cfg.default_system_id or next(iter(ontologies))
    if default_system not in ontologies:
        raise ValueError(f"default system {default_system!r} is not configured")
    store = ReviewStore(cfg.review_dir)

    app = FastAPI(title="medcoder", docs_url=None, redoc_url=None)

    @app.middleware("http")
    async def body_limit(request: Request, call_next):
        length = request.headers.get("content-length")
        if length and int(length) > cfg.max_body_bytes:
            return _error(413, "request body too large")
        try:
            return await asyncio.wait_for(call_next(request), cfg.request_timeout)
        except asyncio.TimeoutError:
            return _error(504, "request timed out")

    @app.get("/healthz")
    def healthz():
        return _json_response({"status": "ok", "systems": sorted(ontologies)})

    @app.post("/v1/code")
    async def code(request: Request):
        body = await request.body()
        if len(body) > cfg.max_body_bytes:
            return _error(413, "request body too large")
        try:
            doc = json.loads(body)
        except ValueError:
            return _error(400, "body is not valid JSON")
        if not isinstance(doc, dict):
            return _error(400, "body must be a JSON object")
        text = doc.get("text")
        if not isinstance(text, str) or not text:
            return _error(400, "'text' must be a non-empty string")
        system_id = doc.get("system_id") or default_system
        if system_id not in ontologies:
            return _error(400, f"unknown system_id {system_id!r}")
        mode = doc.get("mode") or "full"
        if mode not in ("full", "restricted"):
            return _error(400, f"unknown mode {mode!r}")
        restriction = doc.get("restriction")
        if restriction is not None and (
            not isinstance(restriction, list)
            or not all(isinstance(c, str) for c in restriction)
        ):
            return _error(400, "'restriction' must be a list of code strings")
        if mode == "restricted" and not restriction:
            return _error(400, "restricted mode requires a non-empty 'restriction'")
        try:
            pipeline_cfg = PipelineConfig(
                mode=mode,
                restriction=frozenset(restriction) if restriction else None,
                annotator=cfg.annotator,
            )
            results = code_encounter(ontologies[system_id], text, pipeline_cfg)
        except ExternalUnavailable as exc:
            return _error(503, str(exc))
        except MedcoderError as exc:
            return _error(400, str(exc))
        enc_id = "adhoc-" + hashlib.sha256(
            canonical_json({"text": text, "system_id": system_id, "mode": mode,
                            "restriction": sorted(restriction) if restriction else None})
        ).hexdigest()[:16]
        return _json_response(prediction_record(enc_id, results))

    @app.get("/v1/ontology/{system}/code/{code}")
    def ontology_code(system: str, code: str):
        o = ontologies.get(system)
        if o is None:
            return _error(404, f"unknown system {system!r}")
        resolved = o.resolve_code(code)
        if resolved is None:
            return _error(404, f"unknown code {code!r} in {system}")
        entry, seventh = resolved
        return _json_response(
            {
                "code": entry.display_code,
                "canonical": entry.code,
                "title": entry.title,
                "billable": entry.billable,
                "parent": display_code(entry.parent) if entry.parent else None,
                "applied_seventh": seventh,
                "notes": [
                    {"kind": n.kind, "targets": list(n.targets), "text": n.text}
                    for n in entry.notes
                ],
                "children": [c.display_code for c in o.children(entry.code)],
            }
        )

    @app.post("/v1/review/ingest")
    async def review_ingest(request: Request):
        try:
            doc = json.loads(await request.body())
        except ValueError:
            return _error(400, "body is not valid JSON")
        enc_id = doc.get("id")
        notes = doc.get("notes")
        if not enc_id or not isinstance(notes, list) or not notes:
            return _error(400, "record needs an 'id' and a non-empty 'notes' list")
        try:
            assembled = assemble_encounter(notes)
        except (KeyError, TypeError, ValueError) as exc:
            return _error(400, f"invalid notes: {exc}")
        system_id = doc.get("system_id") or default_system
        if system_id not in ontologies:
            return _error(400, f"unknown system_id {system_id!r}")
        o = ontologies[system_id]
        allowed = doc.get("allowed_codes")
        pipeline_cfg = PipelineConfig(
            mode="restricted" if allowed else "full",
            restriction=frozenset(canonical_code(c) for c in allowed) if allowed else None,
            annotator=cfg.annotator,
        )
        try:
            results = code_encounter(o, assembled.text, pipeline_cfg)
        except ExternalUnavailable as exc:
            return _error(503, str(exc))
        suggestions = []
        for r in results:
            entry, _ = o.resolve_code(r.code)
            suggestions.append(
                {
                    "code": r.code,
                    "display_code": display_code(r.code),
                    "title": entry.title,
                    "confidence": r.confidence,
                    "evidence": [
                        {"start": s.start, "end": s.end, "text": s.text}
                        for s in r.evidence
                    ],
                    "trace": r.trace,
                }
            )
        store.ingest(
            {
                "id": str(enc_id),
                "system_id": system_id,
                "text": assembled.text,
                "note_offsets": list(assembled.offsets),
                "gold": doc.get("gold"),
                "suggestions": suggestions,
            }
        )
        return _json_response({"id": str(enc_id), "n_suggestions": len(suggestions)})

    @app.get("/v1/review")
    def review_list():
        return _json_response({"encounters": store.ids()})

    @app.get("/v1/review/{encounter_id}")
    def review_get(encounter_id: str):
        enc = store.get(encounter_id)
        if enc is None:
            return _error(404, f"unknown encounter {encounter_id!r}")
        decisions = store.decisions(encounter_id)
        projected = ReviewStore.project(decisions)
        suggestions = []
        for s in enc["suggestions"]:
            decision = projected.get(s["code"])
            suggestions.append({**s, "decision": decision})
        return _json_response(
            {
                "id": enc["id"],
                "system_id": enc.get("system_id"),
                "text": enc["text"],
                "note_offsets": enc.get("note_offsets", []),
                "suggestions": suggestions,
                "decisions": decisions,
            }
        )

    @app.post("/v1/review/{encounter_id}/decision")
    async def review_decide(encounter_id: str, request: Request):
        enc = store.get(encounter_id)
        if enc is None:
            return _error(404, f"unknown encounter {encounter_id!r}")
        try:
            doc = json.loads(await request.body())
        except ValueError:
            return _error(400, "body is not valid JSON")
        action = doc.get("action")
        if action not in ACTIONS:
            return _error(400, f"action must be one of {ACTIONS}")
        code = canonical_code(str(doc.get("code") or ""))
        suggested = {s["code"] for s in enc["suggestions"]}
        if code not in suggested:
            return _error(400, f"code {code!r} is not among this encounter's suggestions")
        o = ontologies.get(enc.get("system_id") or default_system, ontologies[default_system])
        replacement = doc.get("replacement")
        if action == "replace":
            if not replacement:
                return _error(400, "replace requires a 'replacement' code")
            replacement = canonical_code(str(replacement))
            if o.resolve_code(replacement) is None:
                return _error(400, f"replacement code {replacement!r} is unknown")
        else:
            replacement = None
        decisions = store.append_decision(
            encounter_id,
            {
                "code": code,
                "action": action,
                "replacement": replacement,
                "reviewer": str(doc.get("reviewer") or "anonymous"),
            },
        )
        return _json_response(
            {
                "encounter_id": encounter_id,
                "decisions": decisions,
                "projected": ReviewStore.project(decisions),
            }
        )

    if cfg.ui_dir:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=cfg.ui_dir, html=True), name="ui")

    return app
