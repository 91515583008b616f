import json

import pytest

from medcoder.cli import main
from medcoder.fixtures import toy10_dataset_path, toy10_ontology_path


def test_ontology_validate_ok(capsys):
    assert main(["ontology", "validate", str(toy10_ontology_path())]) == 0
    out = capsys.readouterr().out
    assert "TOY-10" in out and "9 codes" in out


def test_ontology_validate_invalid(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"system_id": "X", "version": "1", "codes": [], "index": []}')
    assert main(["ontology", "validate", str(bad)]) == 1
    assert "empty ontology" in capsys.readouterr().err


def test_ontology_validate_missing_file():
    assert main(["ontology", "validate", "/nonexistent/o.json"]) == 2


def test_code_json_output(tmp_path, capsys):
    note = tmp_path / "note.txt"
    note.write_text("Type 2 diabetes with hyperglycemia.")
    rc = main([
        "code", "--ontology", str(toy10_ontology_path()),
        "--text", str(note), "--json", "--id", "t1",
    ])
    assert rc == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["id"] == "t1"
    assert [r["code"] for r in doc["results"]] == ["E11.65"]


def test_code_human_output(tmp_path, capsys):
    note = tmp_path / "note.txt"
    note.write_text("Essential hypertension.")
    rc = main(["code", "--ontology", str(toy10_ontology_path()), "--text", str(note)])
    assert rc == 0
    out = capsys.readouterr().out
    assert "I10" in out and "evidence" in out


def test_code_restricted(tmp_path, capsys):
    note = tmp_path / "note.txt"
    note.write_text("Essential hypertension.")
    allowed = tmp_path / "allowed.txt"
    allowed.write_text("E11.9\n")
    rc = main([
        "code", "--ontology", str(toy10_ontology_path()),
        "--text", str(note), "--restricted", str(allowed), "--json",
    ])
    assert rc == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["results"] == []


def test_eval_writes_report(tmp_path, capsys):
    out = tmp_path / "report.json"
    rc = main([
        "eval", "--ontology", str(toy10_ontology_path()),
        "--dataset", str(toy10_dataset_path()),
        "--mode", "full", "--runs", "2", "--out", str(out),
    ])
    assert rc == 0
    report = json.loads(out.read_text())
    assert report["runs"] == 2
    assert report["setting"] == "full"
    assert report["micro"]["f1"]["std"] == 0.0


def test_eval_restricted_mode(tmp_path):
    out = tmp_path / "report.json"
    rc = main([
        "eval", "--ontology", str(toy10_ontology_path()),
        "--dataset", str(toy10_dataset_path()),
        "--mode", "restricted", "--runs", "1", "--out", str(out),
    ])
    assert rc == 0
    report = json.loads(out.read_text())
    assert report["setting"] == "restricted"
    assert "restriction" in report


def test_eval_missing_dataset():
    rc = main([
        "eval", "--ontology", str(toy10_ontology_path()),
        "--dataset", "/nonexistent.jsonl",
    ])
    assert rc == 2


def test_eval_external_without_endpoint_is_validation_error():
    rc = main([
        "eval", "--ontology", str(toy10_ontology_path()),
        "--dataset", str(toy10_dataset_path()),
        "--annotator", "external",
    ])
    assert rc == 1


def test_eval_external_annotator_matches_lexicon(tmp_path):
    from medcoder.annotator_stub import StubAnnotatorServer, lexicon_responder
    from medcoder.fixtures import toy10_ontology_path as opath
    from medcoder.ontology import load_ontology

    with open(opath(), "rb") as fh:
        ontology = load_ontology(fh)
    server = StubAnnotatorServer(lexicon_responder(ontology)).start()
    out_ext = tmp_path / "ext.json"
    out_lex = tmp_path / "lex.json"
    try:
        rc = main([
            "eval", "--ontology", str(opath()),
            "--dataset", str(toy10_dataset_path()),
            "--annotator", "external", "--endpoint", server.endpoint,
            "--runs", "1", "--out", str(out_ext),
        ])
        assert rc == 0
    finally:
        server.stop()
    assert main([
        "eval", "--ontology", str(opath()),
        "--dataset", str(toy10_dataset_path()),
        "--runs", "1", "--out", str(out_lex),
    ]) == 0
    ext = json.loads(out_ext.read_text())
    lex = json.loads(out_lex.read_text())
    assert ext["micro"] == lex["micro"]
    assert ext["span_alignment"] == lex["span_alignment"]
