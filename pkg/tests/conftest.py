from __future__ import annotations

import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

import pytest

import helpers


@pytest.fixture
def popular_pairs():
    return helpers.popular_pairs_snapshot()


@pytest.fixture
def golden():
    return helpers.golden_snapshot()


class RegistryState:
    """Scriptable response store for the fixture registry server."""

    def __init__(self):
        self.responses: dict[str, list[tuple[int, bytes]]] = {}
        self.requests: list[str] = []
        self.lock = threading.Lock()

    def set_json(self, path: str, doc) -> None:
        self.responses[path] = [(200, json.dumps(doc).encode("utf-8"))]

    def set_body(self, path: str, status: int, body: bytes) -> None:
        self.responses[path] = [(status, body)]

    def script(self, path: str, sequence) -> None:
        """Respond with each (status, doc) in turn; the last entry repeats."""
        self.responses[path] = [
            (status, json.dumps(doc).encode("utf-8") if doc is not None else b"")
            for status, doc in sequence
        ]

    def npm_package(self, base: str, name: str, downloads: int, dependencies=()) -> None:
        self.set_json(f"/downloads/point/last-week/{name}",
                      {"downloads": downloads, "package": name})
        self.set_json(f"/{name}", {
            "name": name,
            "dist-tags": {"latest": "1.0.0"},
            "versions": {"1.0.0": {"dependencies": {dep: "^1.0.0" for dep in dependencies}}},
        })

    def pypi_package(self, name: str, downloads: int, requires=()) -> None:
        self.set_json(f"/pypi/{name}/json", {
            "info": {
                "name": name,
                "downloads": {"last_day": -1, "last_week": downloads},
                "requires_dist": list(requires),
            },
        })


class _Handler(BaseHTTPRequestHandler):
    def do_GET(self):
        state: RegistryState = self.server.state  # type: ignore[attr-defined]
        with state.lock:
            state.requests.append(self.path)
            entries = state.responses.get(self.path)
            if not entries:
                status, body = 404, b'{"error":"Not found"}'
            else:
                status, body = entries[0]
                if len(entries) > 1:
                    entries.pop(0)
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def log_message(self, *args):
        pass


class FixtureRegistry:
    def __init__(self):
        self.server = ThreadingHTTPServer(("127.0.0.1", 0), _Handler)
        self.state = RegistryState()
        self.server.state = self.state  # type: ignore[attr-defined]
        self.thread = threading.Thread(target=self.server.serve_forever, daemon=True)
        self.thread.start()
        host, port = self.server.server_address[:2]
        self.base_url = f"http://{host}:{port}"

    def close(self):
        self.server.shutdown()
        self.thread.join(timeout=5)
        self.server.server_close()


@pytest.fixture
def registry():
    fixture = FixtureRegistry()
    yield fixture
    fixture.close()
