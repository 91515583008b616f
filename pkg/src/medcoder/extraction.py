"""Evidence extraction: find codeable mentions with exact character offsets.

Two annotators share one output contract. The lexicon annotator is a pure
function over (text, lexicon, config): it greedily scans tokens left to
right, longest phrase wins, and a matched phrase consumes its tokens. The
external annotator forwards the text to an HTTP service and validates every
span it gets back, dropping any whose surface does not reproduce the text.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field

import httpx

from .errors import ExternalUnavailable, MalformedResponse
from .ontology import IndexEntry, Ontology
from .textutil import normalize, sentence_index, token_spans, tokenize

NEGATION_CUES = frozenset({"no", "denies", "without"})
NEGATION_BIGRAM = ("negative", "for")


@dataclass(frozen=True)
class Mention:
    """A codeable span: half-open [start, end) character interval."""

    start: int
    end: int
    surface: str
    normalized: str
    qualifiers: tuple[str, ...] = ()
    negated: bool = False

    def to_dict(self) -> dict:
        return {
            "start": self.start,
            "end": self.end,
            "surface": self.surface,
            "normalized": self.normalized,
            "qualifiers": list(self.qualifiers),
            "negated": self.negated,
        }


@dataclass(frozen=True)
class AnnotatorConfig:
    mode: str = "lexicon"  # "lexicon" | "external"
    negation_window: int = 3
    external_endpoint: str | None = None
    max_inflight: int = 4
    timeout: float = 10.0
    retries: int = 2

    def __post_init__(self):
        if self.mode not in ("lexicon", "external"):
            raise ValueError(f"unknown annotator mode {self.mode!r}")
        if self.mode == "external" and not self.external_endpoint:
            raise ValueError("external annotator mode requires external_endpoint")
        if self.max_inflight < 1:
            raise ValueError("max_inflight must be positive")
        if self.retries < 0:
            raise ValueError("retries must be non-negative")


@dataclass(frozen=True)
class Lexicon:
    """Phrase table: token sequence -> (normalized term, qualifier labels)."""

    phrases: dict[tuple[str, ...], tuple[str, tuple[str, ...]]]
    max_len: int = field(default=0)

    def __len__(self) -> int:
        return len(self.phrases)

    def __contains__(self, phrase: str) -> bool:
        return tuple(tokenize(phrase)) in self.phrases


def build_lexicon(o: Ontology) -> Lexicon:
    """Matching table over index phrase paths, code titles, and inclusion terms.

    An index path (lead term + modifier chain) enters under every token order
    that keeps the modifiers in sequence but floats the lead term between
    them ("diabetes type 2" and "type 2 diabetes" both map back to lead
    "diabetes" with qualifier "type 2"). Titles and inclusion terms enter as
    whole phrases with no qualifier decomposition.
    """
    phrases: dict[tuple[str, ...], tuple[str, tuple[str, ...]]] = {}

    def add(tokens: tuple[str, ...], decomp: tuple[str, tuple[str, ...]]):
        if not tokens:
            return
        prev = phrases.get(tokens)
        if prev is None or decomp < prev:
            phrases[tokens] = decomp

    def add_paths(entry: IndexEntry):
        lead_tokens = tuple(tokenize(entry.lead_term))
        add(lead_tokens, (entry.lead_term, ()))

        def walk(nodes, path_labels: tuple[str, ...]):
            for node in nodes:
                labels = path_labels + (node.label,)
                label_tokens = [tuple(tokenize(lb)) for lb in labels]
                for split in range(len(labels) + 1):
                    tokens: tuple[str, ...] = ()
                    for lt in label_tokens[:split]:
                        tokens += lt
                    tokens += lead_tokens
                    for lt in label_tokens[split:]:
                        tokens += lt
                    add(tokens, (entry.lead_term, labels))
                walk(node.children, labels)

        walk(entry.modifiers, ())

    for entry in o.index:
        add_paths(entry)
    for code in o.codes:
        add(tuple(tokenize(code.title)), (normalize(code.title), ()))
        for note in code.notes:
            if note.kind == "inclusion_term" and note.text:
                add(tuple(tokenize(note.text)), (normalize(note.text), ()))

    max_len = max((len(k) for k in phrases), default=0)
    return Lexicon(phrases=phrases, max_len=max_len)


def _negated_before(
    tokens: list[str], sent_of: list[int], idx: int, window: int
) -> bool:
    """True when a negation cue starts within ``window`` tokens before token
    ``idx`` in the same sentence."""
    lo = max(0, idx - window)
    for j in range(lo, idx):
        if sent_of[j] != sent_of[idx]:
            continue
        tok = tokens[j]
        if tok in NEGATION_CUES:
            return True
        if (
            tok == NEGATION_BIGRAM[0]
            and j + 1 < idx
            and tokens[j + 1] == NEGATION_BIGRAM[1]
        ):
            return True
    return False


def extract_mentions(text: str, lex: Lexicon, cfg: AnnotatorConfig) -> list[Mention]:
    """Deterministic lexicon annotation of ``text``.

    Pure in (text, lex, cfg); mentions come back sorted by start and never
    overlap (greedy longest match consumes its tokens).
    """
    if not text:
        raise ValueError("text must be non-empty")
    spans = token_spans(text)
    tokens = [text[s:e].lower() for s, e in spans]
    sent_ids = sentence_index(text)
    sent_of = [sent_ids[s] for s, _ in spans]

    mentions: list[Mention] = []
    i = 0
    n = len(tokens)
    while i < n:
        matched = False
        for length in range(min(lex.max_len, n - i), 0, -1):
            entry = lex.phrases.get(tuple(tokens[i : i + length]))
            if entry is None:
                continue
            start = spans[i][0]
            end = spans[i + length - 1][1]
            normalized, qualifiers = entry
            mentions.append(
                Mention(
                    start=start,
                    end=end,
                    surface=text[start:end],
                    normalized=normalized,
                    qualifiers=qualifiers,
                    negated=_negated_before(tokens, sent_of, i, cfg.negation_window),
                )
            )
            i += length
            matched = True
            break
        if not matched:
            i += 1
    return mentions


# -- external annotator ------------------------------------------------------

_semaphore_lock = threading.Lock()
_semaphores: dict[str, threading.BoundedSemaphore] = {}


def _endpoint_semaphore(endpoint: str, max_inflight: int) -> threading.BoundedSemaphore:
    # Limit is fixed by the first caller per endpoint.
    with _semaphore_lock:
        sem = _semaphores.get(endpoint)
        if sem is None:
            sem = threading.BoundedSemaphore(max_inflight)
            _semaphores[endpoint] = sem
        return sem


def _normalize_external(text: str, payload: object) -> list[Mention]:
    if not isinstance(payload, dict) or not isinstance(payload.get("mentions"), list):
        raise MalformedResponse("response must be an object with a 'mentions' list")
    out: list[Mention] = []
    for item in payload["mentions"]:
        if not isinstance(item, dict):
            raise MalformedResponse("each mention must be an object")
        raw_quals = item.get("qualifiers") or []
        if not isinstance(raw_quals, list):
            raise MalformedResponse("'qualifiers' must be a list")
        try:
            start = int(item["start"])
            end = int(item["end"])
            surface = str(item["surface"])
            normalized = str(item["normalized"])
            qualifiers = tuple(str(q) for q in raw_quals)
            negated = bool(item.get("negated", False))
        except (KeyError, TypeError, ValueError) as exc:
            raise MalformedResponse(f"mention missing/invalid field: {exc}") from exc
        # Span-level violations are discarded, not fatal.
        if not (0 <= start < end <= len(text)):
            continue
        if text[start:end] != surface or not normalized:
            continue
        out.append(
            Mention(
                start=start,
                end=end,
                surface=surface,
                normalized=normalized,
                qualifiers=qualifiers,
                negated=negated,
            )
        )
    # Same sort/containment normalization as the lexicon path: sort by start,
    # keep only the longest mention at each start, no duplicate spans.
    out.sort(key=lambda m: (m.start, -(m.end - m.start), m.normalized))
    deduped: list[Mention] = []
    seen_spans: set[tuple[int, int]] = set()
    last_start = None
    for m in out:
        if (m.start, m.end) in seen_spans:
            continue
        if m.start == last_start:
            continue  # strictly contained in the longer mention at this start
        seen_spans.add((m.start, m.end))
        deduped.append(m)
        last_start = m.start
    return deduped


def extract_mentions_external(
    text: str, cfg: AnnotatorConfig, client: httpx.Client | None = None
) -> list[Mention]:
    """Annotate via the configured HTTP service (see wire contract in README).

    Retries transport failures and 5xx up to ``cfg.retries`` times, then
    raises ExternalUnavailable. A 200 with an out-of-contract body raises
    MalformedResponse. In-flight requests are bounded per endpoint.
    """
    if cfg.mode != "external" or not cfg.external_endpoint:
        raise ValueError("external annotator mode is not configured")
    if not text:
        raise ValueError("text must be non-empty")
    sem = _endpoint_semaphore(cfg.external_endpoint, cfg.max_inflight)
    own_client = client is None
    if own_client:
        client = httpx.Client(timeout=cfg.timeout)
    try:
        with sem:
            last_error: Exception | None = None
            for _ in range(cfg.retries + 1):
                try:
                    resp = client.post(
                        cfg.external_endpoint, json={"text": text}, timeout=cfg.timeout
                    )
                except httpx.HTTPError as exc:
                    last_error = exc
                    continue
                if resp.status_code >= 500:
                    last_error = MalformedResponse(f"server error {resp.status_code}")
                    continue
                if resp.status_code != 200:
                    raise MalformedResponse(f"unexpected status {resp.status_code}")
                try:
                    payload = resp.json()
                except ValueError as exc:
                    raise MalformedResponse("response body is not JSON") from exc
                return _normalize_external(text, payload)
            raise ExternalUnavailable(
                f"annotator at {cfg.external_endpoint} unavailable after "
                f"{cfg.retries + 1} attempts: {last_error}"
            )
    finally:
        if own_client:
            client.close()
