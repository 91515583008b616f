"""`mc` command line: code one text, run evaluations, validate ontologies,
serve the HTTP API.

Exit codes: 0 success, 1 validation error, 2 I/O error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .bench import load_dataset, run_eval
from .errors import MedcoderError, ParseError, ValidationError
from .extraction import AnnotatorConfig
from .ontology import Ontology, display_code, load_ontology
from .pipeline import PipelineConfig, canonical_json, code_encounter, prediction_record

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_IO = 2


def _load_ontology(path: str) -> Ontology:
    fmt = "icd10cm_xml_adapter" if path.endswith((".xml", ".XML")) else "canonical_json"
    with open(path, "rb") as fh:
        return load_ontology(fh, format=fmt)


def _read_restriction(path: str) -> frozenset[str]:
    text = Path(path).read_text(encoding="utf-8").strip()
    if text.startswith("["):
        codes = json.loads(text)
    else:
        codes = [line.strip() for line in text.splitlines() if line.strip()]
    return frozenset(codes)


def cmd_code(args) -> int:
    o = _load_ontology(args.ontology)
    if args.stdin:
        text = sys.stdin.read()
    else:
        text = Path(args.text).read_text(encoding="utf-8")
    if not text.strip():
        print("error: empty input text", file=sys.stderr)
        return EXIT_VALIDATION
    if args.restricted:
        cfg = PipelineConfig(mode="restricted", restriction=_read_restriction(args.restricted))
    else:
        cfg = PipelineConfig(mode="full")
    results = code_encounter(o, text, cfg)
    if args.json:
        record = prediction_record(args.id, results)
        sys.stdout.write(canonical_json(record).decode("utf-8") + "\n")
    else:
        if not results:
            print("no codes found")
        for r in results:
            entry = o.resolve_code(r.code)
            title = entry[0].title if entry else ""
            spans = ", ".join(f"[{s.start},{s.end}) {s.text!r}" for s in r.evidence)
            print(f"{display_code(r.code):<10} conf={r.confidence:.3f}  {title}")
            print(f"           evidence: {spans}")
    return EXIT_OK


def cmd_eval(args) -> int:
    o = _load_ontology(args.ontology)
    records = load_dataset(args.dataset)
    annotator = AnnotatorConfig(
        mode=args.annotator,
        external_endpoint=args.endpoint,
    )
    cfg = PipelineConfig(mode="full", annotator=annotator)
    report = run_eval(o, records, cfg, runs=args.runs, mode=args.mode)
    out = json.dumps(report, indent=2, sort_keys=True)
    if args.out:
        Path(args.out).write_text(out + "\n", encoding="utf-8")
    else:
        print(out)
    mi = report["micro"]
    print(
        f"micro P={mi['p']['mean']:.4f}±{mi['p']['std']:.4f} "
        f"R={mi['r']['mean']:.4f}±{mi['r']['std']:.4f} "
        f"F1={mi['f1']['mean']:.4f}±{mi['f1']['std']:.4f} "
        f"({report['setting']}, {report['runs']} runs)",
        file=sys.stderr,
    )
    return EXIT_OK


def cmd_ontology_validate(args) -> int:
    o = _load_ontology(args.file)
    billable = sum(1 for e in o.codes if e.billable)
    print(
        f"{o.system_id} {o.version}: {len(o.codes)} codes "
        f"({billable} billable), {len(o.index)} index lead terms: OK"
    )
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    from .service import ServiceConfig, create_app

    cfg = ServiceConfig(
        ontology_paths=list(args.ontology),
        review_dir=args.review_dir,
        ui_dir=args.ui,
    )
    app = create_app(cfg)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="mc", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    pc = sub.add_parser("code", help="code a single encounter text")
    pc.add_argument("--ontology", required=True)
    src = pc.add_mutually_exclusive_group(required=True)
    src.add_argument("--text", help="path to a text file")
    src.add_argument("--stdin", action="store_true")
    pc.add_argument("--restricted", help="path to a restriction code list")
    pc.add_argument("--json", action="store_true", help="emit the prediction record")
    pc.add_argument("--id", default="stdin", help="encounter id for the record")
    pc.set_defaults(func=cmd_code)

    pe = sub.add_parser("eval", help="run the evaluation harness")
    pe.add_argument("--ontology", required=True)
    pe.add_argument("--dataset", required=True)
    pe.add_argument("--mode", choices=["full", "restricted"], default="full")
    pe.add_argument("--runs", type=int, default=1)
    pe.add_argument("--out", help="write the report JSON here")
    pe.add_argument("--annotator", choices=["lexicon", "external"], default="lexicon")
    pe.add_argument("--endpoint", help="external annotator URI")
    pe.set_defaults(func=cmd_eval)

    po = sub.add_parser("ontology", help="ontology utilities")
    posub = po.add_subparsers(dest="subcommand", required=True)
    pov = posub.add_parser("validate", help="load and validate an ontology file")
    pov.add_argument("file")
    pov.set_defaults(func=cmd_ontology_validate)

    ps = sub.add_parser("serve", help="run the coding HTTP service")
    ps.add_argument("--ontology", required=True, action="append",
                    help="ontology file (repeatable)")
    ps.add_argument("--host", default="127.0.0.1")
    ps.add_argument("--port", type=int, default=8720)
    ps.add_argument("--review-dir", default="./review-data")
    ps.add_argument("--ui", help="serve a static UI directory at /")
    ps.set_defaults(func=cmd_serve)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ParseError, ValidationError) as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (MedcoderError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
