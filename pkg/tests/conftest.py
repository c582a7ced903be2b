"""Shared fixtures: a stub consistency-scoring HTTP service."""

import json
import threading
import time
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

import pytest


def default_behavior(claim, context):
    """Label 1 unless the claim carries an explicit '[bad]' marker."""
    return 200, {"label": 0 if "[bad]" in claim else 1}


class StubScorerService:
    """In-process HTTP stand-in for a remote consistency scorer.

    `behavior(claim, context)` returns (status, body); body may be a dict
    (sent as JSON) or raw bytes. Set `delay` to slow responses down. The
    server records every request body and tracks peak concurrency.
    """

    def __init__(self):
        self.behavior = default_behavior
        self.delay = 0.0
        self.requests = []
        self.peak_concurrency = 0
        self._active = 0
        self._lock = threading.Lock()
        service = self

        class Handler(BaseHTTPRequestHandler):
            def do_POST(self):
                with service._lock:
                    service._active += 1
                    service.peak_concurrency = max(service.peak_concurrency, service._active)
                try:
                    length = int(self.headers.get("Content-Length", 0))
                    body = json.loads(self.rfile.read(length))
                    with service._lock:
                        service.requests.append((self.path, body))
                    if service.delay:
                        time.sleep(service.delay)
                    status, payload = service.behavior(body.get("claim", ""), body.get("context", ""))
                    raw = payload if isinstance(payload, bytes) else json.dumps(payload).encode()
                    self.send_response(status)
                    self.send_header("Content-Type", "application/json")
                    self.send_header("Content-Length", str(len(raw)))
                    self.end_headers()
                    self.wfile.write(raw)
                finally:
                    with service._lock:
                        service._active -= 1

            def log_message(self, *args):
                pass

        self._server = ThreadingHTTPServer(("127.0.0.1", 0), Handler)
        self._thread = threading.Thread(target=self._server.serve_forever, daemon=True)

    def start(self):
        self._thread.start()
        return self

    @property
    def url(self):
        host, port = self._server.server_address
        return f"http://{host}:{port}"

    def stop(self):
        self._server.shutdown()
        self._server.server_close()


@pytest.fixture
def stub_scorer():
    service = StubScorerService().start()
    yield service
    service.stop()
