"""Immutable coding-system ontology: tabular hierarchy plus alphabetic index.

The canonical on-disk format is a single JSON document (see ``load_ontology``).
Code identifiers are stored dot-free ("E1165"); the display form re-inserts
the dot after the third character ("E11.65"). Parents must be strict prefixes
of their children, so hierarchy checks are pure string operations.

An :class:`Ontology` is frozen after construction and safe for unlimited
concurrent readers. Updates are modeled as loading a new version.
"""

from __future__ import annotations

import json
from bisect import bisect_left
from dataclasses import dataclass, field
from typing import BinaryIO, Iterable, Optional

from .errors import ParseError, UnknownCode, ValidationError
from .textutil import normalize

NOTE_KINDS = frozenset(
    {"excludes1", "excludes2", "includes", "code_first", "use_additional", "inclusion_term"}
)
_TARGETED_KINDS = frozenset({"excludes1", "excludes2", "code_first", "use_additional"})
MAX_DEPTH = 8


def canonical_code(code: str) -> str:
    """Dot-free uppercase identifier form."""
    return code.replace(".", "").strip().upper()


def display_code(code: str) -> str:
    """Human form: dot after the third character when anything follows it."""
    c = canonical_code(code)
    return c if len(c) <= 3 else f"{c[:3]}.{c[3:]}"


@dataclass(frozen=True)
class SeventhCharRule:
    """Extension-character rule for a code family.

    ``allowed`` maps each legal seventh character to its meaning (e.g.
    ``{"A": "initial"}``); ``placeholder`` pads shorter base codes out to
    six characters before the seventh is appended.
    """

    allowed: dict[str, str]
    placeholder: str


@dataclass(frozen=True)
class Note:
    """Instructional note attached to a code entry.

    ``targets`` holds the identifiers/patterns as written in the source
    document; ``resolved`` is the load-time expansion of those targets
    (prefix patterns like ``E10.-`` become every matching code).
    """

    kind: str
    targets: tuple[str, ...] = ()
    text: Optional[str] = None
    resolved: frozenset[str] = field(default=frozenset(), compare=False)


@dataclass(frozen=True)
class CodeEntry:
    code: str  # canonical (dot-free)
    display_code: str
    title: str
    parent: Optional[str]  # canonical
    billable: bool
    notes: tuple[Note, ...] = ()
    seventh_char: Optional[SeventhCharRule] = None


@dataclass(frozen=True)
class ModifierNode:
    label: str  # normalized
    code: Optional[str]  # canonical
    children: tuple["ModifierNode", ...] = ()


@dataclass(frozen=True)
class IndexEntry:
    lead_term: str  # normalized
    modifiers: tuple[ModifierNode, ...] = ()
    default_code: Optional[str] = None  # canonical
    see_also: Optional[str] = None  # normalized lead term


@dataclass(frozen=True)
class Ontology:
    system_id: str
    version: str
    codes: tuple[CodeEntry, ...]
    index: tuple[IndexEntry, ...]
    _by_code: dict = field(default_factory=dict, compare=False, repr=False)
    _children: dict = field(default_factory=dict, compare=False, repr=False)
    _by_lead: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        by_code = {e.code: e for e in self.codes}
        children: dict[str, list[str]] = {}
        for e in self.codes:
            if e.parent is not None:
                children.setdefault(e.parent, []).append(e.code)
        object.__setattr__(self, "_by_code", by_code)
        object.__setattr__(
            self, "_children", {p: tuple(sorted(cs)) for p, cs in children.items()}
        )
        object.__setattr__(self, "_by_lead", {ie.lead_term: ie for ie in self.index})

    # -- code lookups ------------------------------------------------------

    def get_code(self, code: str) -> Optional[CodeEntry]:
        """Entry for ``code`` (dotted or canonical form), else None."""
        return self._by_code.get(canonical_code(code))

    def resolve_code(self, code: str) -> Optional[tuple[CodeEntry, Optional[str]]]:
        """Resolve ``code``, allowing a seventh-character extension.

        Returns ``(entry, seventh)`` where ``seventh`` is the applied
        extension character, or None when nothing in the ontology matches.
        """
        c = canonical_code(code)
        entry = self._by_code.get(c)
        if entry is not None:
            return entry, None
        if len(c) != 7:
            return None
        stem, ch = c[:6], c[6]
        for cut in range(len(stem), 2, -1):
            base = self._by_code.get(stem[:cut])
            if base is None:
                continue
            rule = self.seventh_char_rule(base.code)
            if (
                rule is not None
                and ch in rule.allowed
                and stem[cut:] == rule.placeholder * (6 - cut)
            ):
                return base, ch
            return None
        return None

    def children(self, code: str) -> list[CodeEntry]:
        """Direct children in lexicographic code order; [] for billable leaves."""
        c = canonical_code(code)
        if c not in self._by_code:
            raise UnknownCode(c)
        return [self._by_code[k] for k in self._children.get(c, ())]

    def ancestors(self, code: str) -> list[str]:
        """Canonical ancestor chain, nearest parent first."""
        entry = self.get_code(code)
        if entry is None:
            raise UnknownCode(canonical_code(code))
        out = []
        cur = entry.parent
        while cur is not None:
            out.append(cur)
            cur = self._by_code[cur].parent
        return out

    def is_strict_ancestor(self, a: str, b: str) -> bool:
        return canonical_code(a) in self.ancestors(b)

    def seventh_char_rule(self, code: str) -> Optional[SeventhCharRule]:
        """Nearest seventh-character rule on ``code`` or any ancestor."""
        entry = self.get_code(code)
        if entry is None:
            raise UnknownCode(canonical_code(code))
        while entry is not None:
            if entry.seventh_char is not None:
                return entry.seventh_char
            entry = self._by_code.get(entry.parent) if entry.parent else None
        return None

    # -- index lookups -----------------------------------------------------

    def get_index_entry(self, lead_term: str) -> Optional[IndexEntry]:
        return self._by_lead.get(normalize(lead_term))

    def lead_terms(self) -> list[str]:
        return list(self._by_lead)


# -- loading ---------------------------------------------------------------


def load_ontology(source: BinaryIO, format: str = "canonical_json") -> Ontology:
    """Parse and validate an ontology from a UTF-8 byte stream.

    Every structural invariant is checked; violations raise
    :class:`ValidationError` naming the offending identifier. Malformed
    documents raise :class:`ParseError` with the character offset.
    """
    if format == "canonical_json":
        return _load_canonical_json(source)
    if format == "icd10cm_xml_adapter":
        from .icd10cm import load_icd10cm_xml

        return load_icd10cm_xml(source)
    raise ValueError(f"unsupported ontology format: {format}")


def _load_canonical_json(source: BinaryIO) -> Ontology:
    raw = source.read()
    if isinstance(raw, str):
        raw = raw.encode("utf-8")
    try:
        doc = json.loads(raw.decode("utf-8"))
    except UnicodeDecodeError as exc:
        raise ParseError("ontology is not valid UTF-8", offset=exc.start) from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed ontology JSON: {exc.msg}", offset=exc.pos) from exc
    if not isinstance(doc, dict):
        raise ParseError("ontology document must be a JSON object", offset=0)
    return build_ontology(doc)


def build_ontology(doc: dict) -> Ontology:
    """Construct and validate an :class:`Ontology` from a parsed document."""
    try:
        system_id = str(doc["system_id"])
        version = str(doc["version"])
        raw_codes = doc["codes"]
        raw_index = doc.get("index", [])
    except KeyError as exc:
        raise ParseError(f"missing required field {exc.args[0]!r}", offset=0) from exc

    entries = []
    for rc in raw_codes:
        code = canonical_code(rc["code"])
        parent = rc.get("parent")
        seventh = rc.get("seventh_char")
        entries.append(
            CodeEntry(
                code=code,
                display_code=display_code(code),
                title=str(rc["title"]),
                parent=canonical_code(parent) if parent else None,
                billable=bool(rc["billable"]),
                notes=tuple(
                    Note(
                        kind=n["kind"],
                        targets=tuple(n.get("targets") or ()),
                        text=n.get("text"),
                    )
                    for n in rc.get("notes") or ()
                ),
                seventh_char=SeventhCharRule(
                    allowed=dict(seventh["allowed"]), placeholder=seventh["placeholder"]
                )
                if seventh
                else None,
            )
        )

    index = tuple(_parse_index_entry(ri) for ri in raw_index)
    entries = _validate(entries, index)
    return Ontology(system_id=system_id, version=version, codes=tuple(entries), index=index)


def _parse_index_entry(ri: dict) -> IndexEntry:
    def parse_mod(m: dict) -> ModifierNode:
        code = m.get("code")
        return ModifierNode(
            label=normalize(m["label"]),
            code=canonical_code(code) if code else None,
            children=tuple(parse_mod(ch) for ch in m.get("children") or ()),
        )

    default = ri.get("default_code")
    see_also = ri.get("see_also")
    return IndexEntry(
        lead_term=normalize(ri["lead_term"]),
        modifiers=tuple(parse_mod(m) for m in ri.get("modifiers") or ()),
        default_code=canonical_code(default) if default else None,
        see_also=normalize(see_also) if see_also else None,
    )


def _expand_target(pattern: str, sorted_codes: list[str]) -> frozenset[str]:
    """Codes matched by a note target: an exact code or a ``X.-`` prefix pattern."""
    pat = pattern.strip()
    is_prefix = pat.endswith("-")
    prefix = canonical_code(pat.rstrip("-").rstrip("."))
    if not is_prefix:
        i = bisect_left(sorted_codes, prefix)
        if i < len(sorted_codes) and sorted_codes[i] == prefix:
            return frozenset({prefix})
        return frozenset()
    lo = bisect_left(sorted_codes, prefix)
    hi = bisect_left(sorted_codes, prefix + "￿")
    return frozenset(sorted_codes[lo:hi])


def _validate(entries: list[CodeEntry], index: tuple[IndexEntry, ...]) -> list[CodeEntry]:
    if not entries:
        raise ValidationError("empty ontology")

    by_code: dict[str, CodeEntry] = {}
    for e in entries:
        if e.code in by_code:
            raise ValidationError(f"duplicate code {e.code}")
        by_code[e.code] = e
    sorted_codes = sorted(by_code)

    n_children: dict[str, int] = {}
    for e in entries:
        if e.parent is not None:
            if e.parent not in by_code:
                raise ValidationError(f"dangling parent {e.parent} on {e.code}")
            if not (e.code.startswith(e.parent) and e.code != e.parent):
                raise ValidationError(
                    f"parent {e.parent} is not a strict prefix of {e.code}"
                )
            n_children[e.parent] = n_children.get(e.parent, 0) + 1

    depth: dict[str, int] = {}
    for e in entries:
        chain = []
        cur: Optional[str] = e.code
        while cur is not None and cur not in depth:
            chain.append(cur)
            if len(chain) > MAX_DEPTH:
                raise ValidationError(f"hierarchy deeper than {MAX_DEPTH} at {e.code}")
            cur = by_code[cur].parent
        base = 0 if cur is None else depth[cur]
        for i, c in enumerate(reversed(chain)):
            depth[c] = base + i + 1
        if depth[e.code] > MAX_DEPTH:
            raise ValidationError(f"hierarchy deeper than {MAX_DEPTH} at {e.code}")

    for e in entries:
        if e.billable and n_children.get(e.code):
            raise ValidationError(f"billable code {e.code} has children")
        if not e.billable and not n_children.get(e.code):
            raise ValidationError(f"non-billable code {e.code} has no children")
        if e.seventh_char is not None:
            rule = e.seventh_char
            if not rule.allowed:
                raise ValidationError(f"empty seventh-char rule on {e.code}")
            if len(rule.placeholder) != 1 or rule.placeholder in rule.allowed:
                raise ValidationError(f"bad seventh-char placeholder on {e.code}")

    # Expand note targets; patterns must match at least one stored code.
    resolved_entries = []
    for e in entries:
        notes = []
        for n in e.notes:
            if n.kind not in NOTE_KINDS:
                raise ValidationError(f"unknown note kind {n.kind!r} on {e.code}")
            if n.kind == "inclusion_term":
                if n.targets:
                    raise ValidationError(f"inclusion_term with targets on {e.code}")
                if not n.text:
                    raise ValidationError(f"inclusion_term without text on {e.code}")
                notes.append(n)
                continue
            resolved: set[str] = set()
            for t in n.targets:
                matched = _expand_target(t, sorted_codes)
                if n.kind in _TARGETED_KINDS and not matched:
                    raise ValidationError(
                        f"note target {t!r} on {e.code} matches no code"
                    )
                resolved |= matched
            notes.append(
                Note(kind=n.kind, targets=n.targets, text=n.text, resolved=frozenset(resolved))
            )
        resolved_entries.append(
            CodeEntry(
                code=e.code,
                display_code=e.display_code,
                title=e.title,
                parent=e.parent,
                billable=e.billable,
                notes=tuple(notes),
                seventh_char=e.seventh_char,
            )
        )

    seen_leads: set[str] = set()
    for ie in index:
        if ie.lead_term in seen_leads:
            raise ValidationError(f"duplicate index lead term {ie.lead_term!r}")
        seen_leads.add(ie.lead_term)
        if ie.default_code and ie.default_code not in by_code:
            raise ValidationError(
                f"index lead {ie.lead_term!r} default code {ie.default_code} missing"
            )
        stack = list(ie.modifiers)
        while stack:
            m = stack.pop()
            if m.code and m.code not in by_code:
                raise ValidationError(
                    f"index modifier {m.label!r} under {ie.lead_term!r} "
                    f"references missing code {m.code}"
                )
            stack.extend(m.children)
    for ie in index:
        if ie.see_also and ie.see_also not in seen_leads:
            raise ValidationError(
                f"see-also {ie.see_also!r} on {ie.lead_term!r} is not a lead term"
            )
    return resolved_entries


# -- serialization ---------------------------------------------------------


def ontology_to_doc(o: Ontology) -> dict:
    """Plain document in the canonical JSON schema (display code forms)."""

    def mod_doc(m: ModifierNode) -> dict:
        return {
            "label": m.label,
            "code": display_code(m.code) if m.code else None,
            "children": [mod_doc(c) for c in m.children],
        }

    return {
        "system_id": o.system_id,
        "version": o.version,
        "codes": [
            {
                "code": e.display_code,
                "title": e.title,
                "parent": display_code(e.parent) if e.parent else None,
                "billable": e.billable,
                "notes": [
                    {"kind": n.kind, "targets": list(n.targets), "text": n.text}
                    for n in e.notes
                ],
                "seventh_char": {
                    "allowed": dict(e.seventh_char.allowed),
                    "placeholder": e.seventh_char.placeholder,
                }
                if e.seventh_char
                else None,
            }
            for e in o.codes
        ],
        "index": [
            {
                "lead_term": ie.lead_term,
                "default_code": display_code(ie.default_code) if ie.default_code else None,
                "see_also": ie.see_also,
                "modifiers": [mod_doc(m) for m in ie.modifiers],
            }
            for ie in o.index
        ],
    }


def serialize_ontology(o: Ontology) -> bytes:
    return json.dumps(ontology_to_doc(o), indent=2, ensure_ascii=False).encode("utf-8")


def iter_billable(o: Ontology) -> Iterable[CodeEntry]:
    return (e for e in o.codes if e.billable)
