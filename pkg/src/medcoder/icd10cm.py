"""Best-effort importer for real ICD-10-CM tabular (and optional index) XML.

The canonical JSON format remains the format of record; this adapter maps
the published tabular XML release (``<chapter>/<section>/<diag>`` nesting,
``<sevenChrDef>``, excludes/includes/inclusionTerm note blocks) onto the same
validated :class:`~medcoder.ontology.Ontology` contract. Release year is
taken from the document when present, never assumed.
"""

from __future__ import annotations

import xml.etree.ElementTree as ET
from typing import BinaryIO

from .errors import ParseError
from .ontology import Ontology, build_ontology

_NOTE_TAGS = {
    "excludes1": "excludes1",
    "excludes2": "excludes2",
    "includes": "includes",
    "useAdditionalCode": "use_additional",
    "codeFirst": "code_first",
    "inclusionTerm": "inclusion_term",
}


def _note_docs(elem: ET.Element) -> list[dict]:
    notes = []
    for tag, kind in _NOTE_TAGS.items():
        for block in elem.findall(tag):
            for note in block.findall("note"):
                text = (note.text or "").strip()
                if not text:
                    continue
                if kind == "inclusion_term":
                    notes.append({"kind": kind, "targets": [], "text": text})
                else:
                    # Target codes are conventionally given in parentheses;
                    # anything unparseable is kept as free text only.
                    targets = _extract_targets(text)
                    if kind in ("excludes1", "excludes2", "use_additional", "code_first") and not targets:
                        notes.append({"kind": "includes", "targets": [], "text": text})
                    else:
                        notes.append({"kind": kind, "targets": targets, "text": text})
    return notes


def _extract_targets(text: str) -> list[str]:
    import re

    targets = []
    for group in re.findall(r"\(([A-Z][0-9][0-9A-Z.\-, ]*)\)", text):
        for part in group.split(","):
            part = part.strip()
            if re.fullmatch(r"[A-Z][0-9][0-9A-Z]*(\.[0-9A-Z]+)?(\.?-)?", part):
                targets.append(part)
    return targets


def _walk_diag(elem: ET.Element, parent: str | None, out: list[dict], seventh: dict | None):
    name = elem.findtext("name")
    desc = elem.findtext("desc") or ""
    if not name:
        return
    children = elem.findall("diag")
    seven_def = elem.find("sevenChrDef")
    rule = None
    if seven_def is not None:
        allowed = {}
        for ext in seven_def.findall("extension"):
            ch = ext.get("char")
            if ch:
                allowed[ch] = (ext.text or "").strip()
        if allowed:
            rule = {"allowed": allowed, "placeholder": "X"}
    out.append(
        {
            "code": name.strip(),
            "title": desc.strip(),
            "parent": parent,
            "billable": not children,
            "notes": _note_docs(elem),
            "seventh_char": rule,
        }
    )
    for child in children:
        _walk_diag(child, name.strip(), out, rule or seventh)


def load_icd10cm_xml(source: BinaryIO) -> Ontology:
    try:
        tree = ET.parse(source)
    except ET.ParseError as exc:
        raise ParseError(f"malformed ICD-10-CM XML: {exc}", offset=exc.position[1]) from exc
    root = tree.getroot()
    version = root.findtext("version") or root.findtext(".//version") or "unknown"
    codes: list[dict] = []
    for diag in root.iter("diag"):
        # iter() would revisit nested diags; only walk top-level ones.
        break
    for chapter in root.iter("chapter"):
        for section in chapter.iter("section"):
            for diag in section.findall("diag"):
                _walk_diag(diag, None, codes, None)
    if not codes:  # some releases omit <section>
        for chapter in root.iter("chapter"):
            for diag in chapter.findall("diag"):
                _walk_diag(diag, None, codes, None)
    doc = {
        "system_id": "ICD-10-CM",
        "version": str(version).strip(),
        "codes": codes,
        "index": [],
    }
    return build_ontology(doc)
