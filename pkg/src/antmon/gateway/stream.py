"""NDJSON broadcast over HTTP.

GET /stream?backlog=N replays the last N retained messages, then tails live
ones, with a heartbeat line during silences. POST /command injects operator
commands. Consumers get bounded queues; a consumer that cannot keep up is
dropped so the pipeline never waits on a socket.
"""

from __future__ import annotations

import json
import queue
import threading
from datetime import datetime, timezone
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from urllib.parse import parse_qs, urlparse

from . import events
from .live import LineRunner

DEFAULT_RING = 4096
DEFAULT_QUEUE = 1000


class Subscription:
    def __init__(self, backlog: list[dict], maxsize: int):
        self.backlog = backlog
        self.queue: queue.Queue = queue.Queue(maxsize=maxsize)
        self.dead = False


class Broadcaster:
    """Fan-out with a bounded ring of recent messages for late joiners."""

    def __init__(self, ring_size: int = DEFAULT_RING, queue_size: int = DEFAULT_QUEUE):
        self._lock = threading.Lock()
        self._ring: list[dict] = []
        self._ring_size = ring_size
        self._queue_size = queue_size
        self._subs: list[Subscription] = []

    def publish(self, message: dict) -> None:
        with self._lock:
            self._ring.append(message)
            if len(self._ring) > self._ring_size:
                del self._ring[: len(self._ring) - self._ring_size]
            for sub in list(self._subs):
                try:
                    sub.queue.put_nowait(message)
                except queue.Full:
                    # overflow means this consumer is too slow: drop it, not the line
                    sub.dead = True
                    self._subs.remove(sub)

    def subscribe(self, backlog: int = 0) -> Subscription:
        with self._lock:
            tail = self._ring[-backlog:] if backlog > 0 else []
            sub = Subscription(list(tail), self._queue_size)
            self._subs.append(sub)
            return sub

    def unsubscribe(self, sub: Subscription) -> None:
        with self._lock:
            sub.dead = True
            if sub in self._subs:
                self._subs.remove(sub)

    @property
    def consumer_count(self) -> int:
        with self._lock:
            return len(self._subs)


MIME = {".html": "text/html", ".js": "text/javascript", ".css": "text/css", ".map": "application/json"}


class StreamServer:
    """HTTP front: /stream for consumers, /command for operators, optional static UI."""

    def __init__(
        self,
        runner: LineRunner,
        broadcaster: Broadcaster,
        host: str = "127.0.0.1",
        port: int = 0,
        heartbeat_seconds: float = 10.0,
        ui_dir: str | Path | None = None,
    ):
        self.runner = runner
        self.broadcaster = broadcaster
        self.heartbeat_seconds = heartbeat_seconds
        self.ui_dir = Path(ui_dir) if ui_dir else None
        server = self

        class Handler(BaseHTTPRequestHandler):
            # HTTP/1.0: the stream body simply never ends; no chunking needed
            protocol_version = "HTTP/1.0"

            def log_message(self, fmt, *args):  # quiet by default
                pass

            def _cors(self):
                self.send_header("Access-Control-Allow-Origin", "*")

            def do_OPTIONS(self):
                self.send_response(204)
                self._cors()
                self.send_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS")
                self.send_header("Access-Control-Allow-Headers", "Content-Type")
                self.end_headers()

            def do_GET(self):
                url = urlparse(self.path)
                if url.path == "/stream":
                    params = parse_qs(url.query)
                    try:
                        backlog = int(params.get("backlog", ["0"])[0])
                    except ValueError:
                        backlog = 0
                    server._serve_stream(self, max(0, backlog))
                elif server.ui_dir is not None:
                    server._serve_static(self, url.path)
                else:
                    self._json(404, {"ok": False, "error": "not_found"})

            def do_POST(self):
                if urlparse(self.path).path != "/command":
                    self._json(404, {"ok": False, "error": "not_found"})
                    return
                try:
                    length = int(self.headers.get("Content-Length", "0"))
                    body = json.loads(self.rfile.read(length) or b"{}")
                except (ValueError, json.JSONDecodeError):
                    self._json(400, {"ok": False, "error": "bad_json"})
                    return
                result = server.runner.apply_command(body)
                status = 200
                if not result.get("ok"):
                    status = {"unknown_alarm": 404, "invalid_transition": 409}.get(
                        result.get("error", ""), 400
                    )
                self._json(status, result)

            def _json(self, status: int, payload: dict):
                raw = (events.to_line(payload) + "\n").encode()
                self.send_response(status)
                self._cors()
                self.send_header("Content-Type", "application/json")
                self.send_header("Content-Length", str(len(raw)))
                self.end_headers()
                self.wfile.write(raw)

        self._httpd = ThreadingHTTPServer((host, port), Handler)
        self._httpd.daemon_threads = True
        self._thread: threading.Thread | None = None

    # -- endpoint bodies ----------------------------------------------------

    def _serve_stream(self, handler: BaseHTTPRequestHandler, backlog: int) -> None:
        sub = self.broadcaster.subscribe(backlog)
        try:
            handler.send_response(200)
            handler.send_header("Access-Control-Allow-Origin", "*")
            handler.send_header("Content-Type", "application/x-ndjson")
            handler.send_header("Cache-Control", "no-store")
            handler.end_headers()
            for message in sub.backlog:
                handler.wfile.write((events.to_line(message) + "\n").encode())
            handler.wfile.flush()
            while not sub.dead:
                try:
                    message = sub.queue.get(timeout=self.heartbeat_seconds)
                except queue.Empty:
                    message = events.heartbeat_message(datetime.now(tz=timezone.utc))
                handler.wfile.write((events.to_line(message) + "\n").encode())
                handler.wfile.flush()
        except (BrokenPipeError, ConnectionResetError):
            pass
        finally:
            self.broadcaster.unsubscribe(sub)

    def _serve_static(self, handler: BaseHTTPRequestHandler, path: str) -> None:
        name = "index.html" if path in ("", "/") else path.lstrip("/")
        target = (self.ui_dir / name).resolve()
        if not str(target).startswith(str(self.ui_dir.resolve())) or not target.is_file():
            raw = b'{"ok":false,"error":"not_found"}\n'
            handler.send_response(404)
            handler.send_header("Content-Length", str(len(raw)))
            handler.end_headers()
            handler.wfile.write(raw)
            return
        raw = target.read_bytes()
        handler.send_response(200)
        handler.send_header("Content-Type", MIME.get(target.suffix, "application/octet-stream"))
        handler.send_header("Content-Length", str(len(raw)))
        handler.end_headers()
        handler.wfile.write(raw)

    # -- lifecycle ------------------------------------------------------------

    @property
    def port(self) -> int:
        return self._httpd.server_address[1]

    def start(self) -> None:
        self._thread = threading.Thread(target=self._httpd.serve_forever, daemon=True)
        self._thread.start()

    def stop(self) -> None:
        self._httpd.shutdown()
        self._httpd.server_close()

    def serve_forever(self) -> None:
        self._httpd.serve_forever()
