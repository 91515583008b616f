"""Minimal external-annotator stand-in for tests and demos.

Implements the wire contract (POST {"text": ...} -> {"mentions": [...]})
on stdlib http.server so tests can run it in a background thread. The
default responder echoes lexicon-annotator output for a given ontology;
tests can inject any responder, including broken ones.
"""

from __future__ import annotations

import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from typing import Callable

Responder = Callable[[str], object]


def lexicon_responder(ontology) -> Responder:
    from .extraction import AnnotatorConfig, extract_mentions
    from .pipeline import lexicon_for

    cfg = AnnotatorConfig()

    def respond(text: str):
        return {"mentions": [m.to_dict() for m in extract_mentions(text, lexicon_for(ontology), cfg)]}

    return respond


class StubAnnotatorServer:
    """Threaded HTTP server answering the annotator contract."""

    def __init__(self, responder: Responder, host: str = "127.0.0.1", port: int = 0):
        outer = self

        class Handler(BaseHTTPRequestHandler):
            def do_POST(self):
                length = int(self.headers.get("Content-Length", 0))
                body = self.rfile.read(length)
                try:
                    text = json.loads(body)["text"]
                except (ValueError, KeyError):
                    self.send_response(400)
                    self.end_headers()
                    return
                try:
                    payload = outer.responder(text)
                except Exception:
                    self.send_response(500)
                    self.end_headers()
                    return
                data = payload if isinstance(payload, bytes) else json.dumps(payload).encode()
                self.send_response(200)
                self.send_header("Content-Type", "application/json")
                self.send_header("Content-Length", str(len(data)))
                self.end_headers()
                self.wfile.write(data)

            def log_message(self, *args):
                pass

        self.responder = responder
        self._server = ThreadingHTTPServer((host, port), Handler)
        self._thread = threading.Thread(target=self._server.serve_forever, daemon=True)

    @property
    def endpoint(self) -> str:
        host, port = self._server.server_address[:2]
        return f"http://{host}:{port}/"

    def start(self) -> "StubAnnotatorServer":
        self._thread.start()
        return self

    def stop(self):
        self._server.shutdown()
        self._server.server_close()


def main(argv=None):
    import argparse

    from .ontology import load_ontology

    parser = argparse.ArgumentParser(description="run the echo annotator stub")
    parser.add_argument("--ontology", required=True)
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, default=8721)
    args = parser.parse_args(argv)
    with open(args.ontology, "rb") as fh:
        ontology = load_ontology(fh)
    server = StubAnnotatorServer(lexicon_responder(ontology), args.host, args.port)
    print(f"annotator stub listening on {server.endpoint}")
    server.start()
    try:
        server._thread.join()
    except KeyboardInterrupt:
        server.stop()


if __name__ == "__main__":
    main()
