#!/usr/bin/env python3
"""Materialize the frozen TOY-10 fixture dataset and golden predictions.

The golden records below were derived by hand-tracing each encounter through
the four coding stages (lexicon match -> index path -> tabular descent ->
reconciliation) before the engine was implemented. This script only does the
string-length arithmetic for span offsets; every surface string is asserted
so a slip in the arithmetic fails loudly. It deliberately does NOT import the
engine: the golden file is an independent oracle, not a snapshot.

Encounters enc-01..enc-05 are the unambiguous half: gold equals the expected
prediction exactly. enc-06..enc-10 exercise misses, contradictions, evidence
granularity mismatch, and overprediction.
"""

import json
from pathlib import Path

FIXTURES = Path(__file__).resolve().parent.parent / "src" / "medcoder" / "fixtures"


def header(note_type: str) -> str:
    return f"\n\n===== {note_type} =====\n\n"


def assemble(notes):
    text = ""
    for note_type, body in notes:
        text += header(note_type) + body
    return text


def span_of(text: str, surface: str, occurrence: int = 0) -> list:
    start = -1
    for _ in range(occurrence + 1):
        start = text.index(surface, start + 1)
    end = start + len(surface)
    assert text[start:end] == surface
    return [start, end]


def mention(span, surface, normalized, qualifiers, negated=False):
    return {
        "start": span[0],
        "end": span[1],
        "surface": surface,
        "normalized": normalized,
        "qualifiers": qualifiers,
        "negated": negated,
    }


def result(code, span_surfaces, trace):
    return {
        "code": code,
        "confidence": 1.0,
        "evidence": [{"start": s, "end": e, "text": t} for (s, e), t in span_surfaces],
        "trace": trace,
    }


def trace(mention_d, location, lead, path, validated_code, validated_path,
          seventh=None, note="kept"):
    return {
        "mention": mention_d,
        "index_hit": {
            "location": location,
            "matched_lead": lead,
            "matched_path": path,
            "score": 1.0,
        },
        "validated": {
            "code": validated_code,
            "path": validated_path,
            "applied_seventh": seventh,
        },
        "reconciliation_note": note,
    }


def build():
    encounters = []

    # enc-01: exact index phrase, full modifier chain consumed.
    notes = [("note", "Patient has type 2 diabetes with hyperglycemia.")]
    text = assemble(notes)
    m = span_of(text, "type 2 diabetes with hyperglycemia")
    assert m == [32, 66]
    encounters.append(
        dict(
            id="enc-01",
            notes=notes,
            gold=[("E11.65", [m])],
            results=[
                result(
                    "E11.65",
                    [(tuple(m), "type 2 diabetes with hyperglycemia")],
                    trace(
                        mention(m, "type 2 diabetes with hyperglycemia", "diabetes",
                                ["type 2", "with hyperglycemia"]),
                        "E1165", "diabetes", ["type 2", "with hyperglycemia"],
                        "E1165", ["E1165"],
                    ),
                )
            ],
        )
    )

    # enc-02: bare lead term -> default index code.
    notes = [("note", "Essential hypertension.")]
    text = assemble(notes)
    m = span_of(text, "hypertension")
    assert m == [30, 42]
    encounters.append(
        dict(
            id="enc-02",
            notes=notes,
            gold=[("I10", [m])],
            results=[
                result(
                    "I10",
                    [(tuple(m), "hypertension")],
                    trace(mention(m, "hypertension", "hypertension", []),
                          "I10", "hypertension", [], "I10", ["I10"]),
                )
            ],
        )
    )

    # enc-03: two notes; negated mention suppressed; offsets cross note headers.
    notes = [("hpi", "Denies hypertension."), ("assessment", "Type 1 diabetes.")]
    text = assemble(notes)
    m = span_of(text, "Type 1 diabetes")
    assert m == [65, 80]
    encounters.append(
        dict(
            id="enc-03",
            notes=notes,
            gold=[("E10.9", [m])],
            results=[
                result(
                    "E10.9",
                    [(tuple(m), "Type 1 diabetes")],
                    trace(mention(m, "Type 1 diabetes", "diabetes", ["type 1"]),
                          "E109", "diabetes", ["type 1"], "E109", ["E109"]),
                )
            ],
        )
    )

    # enc-04: modifier phrase with trailing narration.
    notes = [("note", "Type 1 diabetes noted.")]
    text = assemble(notes)
    m = span_of(text, "Type 1 diabetes")
    assert m == [20, 35]
    encounters.append(
        dict(
            id="enc-04",
            notes=notes,
            gold=[("E10.9", [m])],
            results=[
                result(
                    "E10.9",
                    [(tuple(m), "Type 1 diabetes")],
                    trace(mention(m, "Type 1 diabetes", "diabetes", ["type 1"]),
                          "E109", "diabetes", ["type 1"], "E109", ["E109"]),
                )
            ],
        )
    )

    # enc-05: seventh-character family; default episode char A.
    notes = [("note", "Radius fracture, lower end, initial encounter.")]
    text = assemble(notes)
    m = span_of(text, "Radius fracture, lower end")
    assert m == [20, 46]
    encounters.append(
        dict(
            id="enc-05",
            notes=notes,
            gold=[("S52.501A", [m])],
            results=[
                result(
                    "S52.501A",
                    [(tuple(m), "Radius fracture, lower end")],
                    trace(
                        mention(m, "Radius fracture, lower end", "fracture",
                                ["radius", "lower end"]),
                        "S52501", "fracture", ["radius", "lower end"],
                        "S52501A", ["S52501"], seventh="A",
                    ),
                )
            ],
        )
    )

    # enc-06: gold code with no lexicon phrase -> false negative.
    notes = [("note", "Hypertension. Blood sugar elevated.")]
    text = assemble(notes)
    m = span_of(text, "Hypertension")
    assert m == [20, 32]
    m_gold2 = span_of(text, "Blood sugar elevated")
    assert m_gold2 == [34, 54]
    encounters.append(
        dict(
            id="enc-06",
            notes=notes,
            gold=[("I10", [m]), ("E11.65", [m_gold2])],
            results=[
                result(
                    "I10",
                    [(tuple(m), "Hypertension")],
                    trace(mention(m, "Hypertension", "hypertension", []),
                          "I10", "hypertension", [], "I10", ["I10"]),
                )
            ],
        )
    )

    # enc-07: contradictory documentation; excludes1 drops the type 1 code.
    notes = [("note", "Type 1 diabetes. Type 2 diabetes.")]
    text = assemble(notes)
    m1 = span_of(text, "Type 1 diabetes")
    m2 = span_of(text, "Type 2 diabetes")
    assert m1 == [20, 35] and m2 == [37, 52]
    encounters.append(
        dict(
            id="enc-07",
            notes=notes,
            gold=[("E10.9", [m1])],
            results=[
                result(
                    "E11.9",
                    [(tuple(m2), "Type 2 diabetes")],
                    trace(mention(m2, "Type 2 diabetes", "diabetes", ["type 2"]),
                          "E119", "diabetes", ["type 2"], "E119", ["E119"],
                          note="kept; displaced E109:excludes1_conflict"),
                )
            ],
        )
    )

    # enc-08: duplicate mentions merge into one code with two evidence spans.
    notes = [("note", "Hypertension. History of hypertension.")]
    text = assemble(notes)
    m1 = span_of(text, "Hypertension")
    m2 = span_of(text, "hypertension", occurrence=0)
    assert m1 == [20, 32] and m2 == [45, 57]
    encounters.append(
        dict(
            id="enc-08",
            notes=notes,
            gold=[("I10", [m1, m2])],
            results=[
                result(
                    "I10",
                    [(tuple(m1), "Hypertension"), (tuple(m2), "hypertension")],
                    trace(mention(m1, "Hypertension", "hypertension", []),
                          "I10", "hypertension", [], "I10", ["I10"]),
                )
            ],
        )
    )

    # enc-09: correct code, broader predicted span than the gold annotation.
    notes = [("note", "Type 2 diabetes with hyperglycemia and chronic issues.")]
    text = assemble(notes)
    m = span_of(text, "Type 2 diabetes with hyperglycemia")
    g = span_of(text, "hyperglycemia")
    assert m == [20, 54] and g == [41, 54]
    encounters.append(
        dict(
            id="enc-09",
            notes=notes,
            gold=[("E11.65", [g])],
            results=[
                result(
                    "E11.65",
                    [(tuple(m), "Type 2 diabetes with hyperglycemia")],
                    trace(
                        mention(m, "Type 2 diabetes with hyperglycemia", "diabetes",
                                ["type 2", "with hyperglycemia"]),
                        "E1165", "diabetes", ["type 2", "with hyperglycemia"],
                        "E1165", ["E1165"],
                    ),
                )
            ],
        )
    )

    # enc-10: bare "diabetes" overpredicts the index default -> false positive.
    notes = [("note", "Diabetes screening negative; hypertension stable.")]
    text = assemble(notes)
    m1 = span_of(text, "Diabetes")
    m2 = span_of(text, "hypertension")
    assert m1 == [20, 28] and m2 == [49, 61]
    encounters.append(
        dict(
            id="enc-10",
            notes=notes,
            gold=[("I10", [m2])],
            results=[
                result(
                    "E11.9",
                    [(tuple(m1), "Diabetes")],
                    trace(mention(m1, "Diabetes", "diabetes", []),
                          "E119", "diabetes", [], "E119", ["E119"]),
                ),
                result(
                    "I10",
                    [(tuple(m2), "hypertension")],
                    trace(mention(m2, "hypertension", "hypertension", []),
                          "I10", "hypertension", [], "I10", ["I10"]),
                ),
            ],
        )
    )
    return encounters


def main():
    encounters = build()
    dataset_lines = []
    golden_lines = []
    for enc in encounters:
        dataset_lines.append(
            json.dumps(
                {
                    "id": enc["id"],
                    "notes": [
                        {"note_type": nt, "text": body} for nt, body in enc["notes"]
                    ],
                    "gold": [
                        {"code": code, "spans": spans} for code, spans in enc["gold"]
                    ],
                    "allowed_codes": None,
                },
                ensure_ascii=True,
            )
        )
        golden_lines.append(
            json.dumps(
                {"id": enc["id"], "results": enc["results"]},
                sort_keys=True,
                separators=(",", ":"),
                ensure_ascii=True,
            )
        )
    (FIXTURES / "toy10.dataset.jsonl").write_text("\n".join(dataset_lines) + "\n")
    (FIXTURES / "toy10.golden.jsonl").write_text("\n".join(golden_lines) + "\n")
    print(f"wrote {len(encounters)} encounters to {FIXTURES}")


if __name__ == "__main__":
    main()
