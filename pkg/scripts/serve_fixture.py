#!/usr/bin/env python3
"""Start the coding service over the fixture ontology and pre-ingest the
fixture encounters so the review workbench has something to show.

Usage: python scripts/serve_fixture.py [--port 8720] [--ui frontend/dist]
"""

import argparse
import json
import threading
import time

import httpx
import uvicorn

from medcoder.fixtures import toy10_dataset_path, toy10_ontology_path
from medcoder.service import ServiceConfig, create_app


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, default=8720)
    parser.add_argument("--review-dir", default="./review-data")
    parser.add_argument("--ui", help="static UI directory (e.g. frontend)")
    args = parser.parse_args()

    cfg = ServiceConfig(
        ontology_paths=[str(toy10_ontology_path())],
        review_dir=args.review_dir,
        ui_dir=args.ui,
    )
    app = create_app(cfg)

    def ingest_fixture():
        base = f"http://{args.host}:{args.port}"
        for _ in range(50):
            try:
                httpx.get(f"{base}/healthz", timeout=0.5)
                break
            except httpx.HTTPError:
                time.sleep(0.2)
        with open(toy10_dataset_path(), encoding="utf-8") as fh:
            for line in fh:
                if line.strip():
                    httpx.post(f"{base}/v1/review/ingest", json=json.loads(line))
        print(f"fixture encounters ingested; service at {base}")

    threading.Thread(target=ingest_fixture, daemon=True).start()
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")


if __name__ == "__main__":
    main()
