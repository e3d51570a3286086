import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

import pytest

from support import FIXTURES, fixture_path, stub_url  # noqa: F401 (re-exported for fixtures)
from sadele import (
    PipelineConfig,
    load_embeddings,
    load_frequency_table,
    load_pos_lexicon,
    load_table_backend,
)


@pytest.fixture(scope="session")
def freq_table():
    return load_frequency_table(fixture_path("freq.tsv"))


@pytest.fixture(scope="session")
def embeddings():
    return load_embeddings(fixture_path("embeddings.txt"))


@pytest.fixture(scope="session")
def pos_lexicon():
    return load_pos_lexicon(fixture_path("pos_lexicon.tsv"))


@pytest.fixture(scope="session")
def table_backend():
    return load_table_backend(fixture_path("mlm_table.tsv"))


@pytest.fixture()
def default_cfg():
    return PipelineConfig()


class _StubHandler(BaseHTTPRequestHandler):
    """Canned model-server responses for exercising the HTTP client."""

    server_version = "stub"

    def do_POST(self):
        length = int(self.headers.get("Content-Length", 0))
        body = json.loads(self.rfile.read(length) or b"{}")
        behavior = self.server.behavior
        if behavior == "unavailable":
            self._reply(503, {"detail": "model not loaded"})
            return
        if self.path == "/v1/mask-predict":
            self._reply(200, {"candidates": self.server.candidates[: body.get("top_k", 0)]})
        elif self.path == "/v1/token-loss":
            self._reply(200, {"loss": self.server.loss_per_position * len(body["positions"])})
        else:
            self._reply(404, {"detail": "no such route"})

    def do_GET(self):
        if self.path == "/v1/health":
            ok = self.server.behavior != "unavailable"
            self._reply(200 if ok else 503, {"status": "ok" if ok else "loading"})
        else:
            self._reply(404, {"detail": "no such route"})

    def _reply(self, status: int, payload: dict):
        data = json.dumps(payload).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(data)))
        self.end_headers()
        self.wfile.write(data)

    def log_message(self, *args):
        pass


@pytest.fixture()
def stub_server():
    server = ThreadingHTTPServer(("127.0.0.1", 0), _StubHandler)
    server.behavior = "ok"
    server.candidates = [
        {"token": "zor", "log_prob": -0.5},
        {"token": "güç", "log_prob": -1.2},
    ]
    server.loss_per_position = 0.25
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    try:
        yield server
    finally:
        server.shutdown()
        thread.join()

