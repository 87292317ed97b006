"""Static file server for exported viz documents plus an annotation sink.

GET serves files from the export directory; POST /annotations appends the
submitted records to a per-annotator JSONL file. Single process, no shared
mutable state beyond append-only files.
"""

from __future__ import annotations

import json
import os
import re
from http.server import SimpleHTTPRequestHandler, ThreadingHTTPServer

_ANNOTATOR_RE = re.compile(r"[^A-Za-z0-9_-]+")


def make_handler(directory: str):
    class Handler(SimpleHTTPRequestHandler):
        def __init__(self, *args, **kwargs):
            super().__init__(*args, directory=directory, **kwargs)

        def log_message(self, fmt, *args):  # quiet by default
            pass

        def end_headers(self):
            self.send_header("Access-Control-Allow-Origin", "*")
            super().end_headers()

        def do_OPTIONS(self):
            self.send_response(204)
            self.send_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS")
            self.send_header("Access-Control-Allow-Headers", "Content-Type")
            self.end_headers()

        def do_POST(self):
            if self.path.rstrip("/") != "/annotations":
                self.send_error(404, "only /annotations accepts POST")
                return
            length = int(self.headers.get("Content-Length", "0"))
            raw = self.rfile.read(length)
            try:
                payload = json.loads(raw.decode("utf-8"))
                records = payload["records"]
                annotator = payload.get("annotator_id", "anonymous")
            except (json.JSONDecodeError, KeyError, UnicodeDecodeError) as exc:
                self.send_error(400, f"bad annotation payload: {exc}")
                return
            annotator = _ANNOTATOR_RE.sub("_", str(annotator)) or "anonymous"
            out_path = os.path.join(directory, f"annotations-{annotator}.jsonl")
            with open(out_path, "a", encoding="utf-8") as fh:
                for record in records:
                    fh.write(json.dumps(record) + "\n")
            body = json.dumps({"saved": len(records), "file": out_path}).encode()
            self.send_response(200)
            self.send_header("Content-Type", "application/json")
            self.send_header("Content-Length", str(len(body)))
            self.end_headers()
            self.wfile.write(body)

    return Handler


def run_server(directory: str, port: int, poll=None) -> None:
    server = ThreadingHTTPServer(("127.0.0.1", port), make_handler(directory))
    print(f"serving {directory} on http://127.0.0.1:{port}")
    try:
        server.serve_forever(poll_interval=0.2)
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()


def start_background(directory: str, port: int) -> ThreadingHTTPServer:
    """For tests: serve on a background thread; caller shuts it down."""
    import threading

    server = ThreadingHTTPServer(("127.0.0.1", port), make_handler(directory))
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    return server
