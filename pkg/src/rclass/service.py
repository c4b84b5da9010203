"""HTTP/JSON service exposing a running learner to operator consoles.

One engine thread drives the prequential loop; HTTP handlers only read
shared state under a lock or post label answers.  Interactive label
queries block the engine (one pending query at a time) until a console
answers or the deadline passes; an event-stream endpoint pushes query,
state, and structural-event messages to subscribed consoles.
"""

from __future__ import annotations

import json
import queue
import threading
import time
from dataclasses import dataclass, field
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from typing import Optional

from .dataset import Normalizer
from .harness import FileOracle, RunReport, run_prequential
from .learner import OnlineLearner
from .model import StreamSample
from .selection import Decision


@dataclass
class PendingQuery:
    id: int
    index: int
    features: list[float]
    out_conf: float
    posterior: list[float]
    deadline: float
    answered: threading.Event = field(default_factory=threading.Event)
    label: Optional[int] = None

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "index": self.index,
            "features": self.features,
            "output_conflict": self.out_conf,
            "input_posterior": self.posterior,
            "deadline_ms": max(0, int((self.deadline - time.time()) * 1000)),
        }


class InteractiveOracle:
    """Bridges engine label requests to connected consoles."""

    def __init__(self, server: "EngineServer", timeout_s: float):
        self.server = server
        self.timeout_s = timeout_s

    def query(self, sample: StreamSample, decision: Decision) -> Optional[int]:
        srv = self.server
        with srv.lock:
            srv.query_seq += 1
            pending = PendingQuery(
                id=srv.query_seq,
                index=sample.index,
                features=[float(v) for v in sample.x],
                out_conf=float(decision.out_conf),
                posterior=[float(v) for v in decision.posterior],
                deadline=time.time() + self.timeout_s,
            )
            srv.pending = pending
        srv.publish({"type": "query", "query": pending.to_json()})
        answered = pending.answered.wait(timeout=self.timeout_s)
        with srv.lock:
            srv.pending = None
        if not answered:
            srv.publish({"type": "event",
                         "event": {"index": sample.index, "type": "query_timeout"}})
            return None
        return pending.label


class EngineServer:
    """Shared state between the engine thread and the HTTP handlers."""

    def __init__(self, learner: OnlineLearner, stream: list[StreamSample],
                 split: tuple[int, int], oracle_kind: str = "interactive",
                 timeout_s: float = 60.0, seed: Optional[int] = None,
                 class_names: Optional[list[str]] = None,
                 feature_names: Optional[list[str]] = None,
                 static_dir: Optional[str] = None,
                 pace_s: float = 0.0):
        self.learner = learner
        self.stream = stream
        self.split = split
        self.seed = seed
        self.lock = threading.RLock()
        self.pending: Optional[PendingQuery] = None
        self.query_seq = 0
        self.report: Optional[RunReport] = None
        self.done = threading.Event()
        self.subscribers: list[queue.Queue] = []
        self.class_names = class_names or [str(i) for i in range(learner.n_classes)]
        self.feature_names = feature_names or [f"feature_{j + 1}"
                                               for j in range(learner.n_features)]
        self.static_dir = static_dir
        self.pace_s = pace_s
        self._events_published = 0
        self._rule_trace: list[list] = []
        self._weight_trace: list[list] = []
        if oracle_kind == "interactive":
            self.oracle = InteractiveOracle(self, timeout_s)
        else:
            self.oracle = FileOracle()

    # -- engine ------------------------------------------------------------

    def run_engine(self) -> RunReport:
        normalizer = Normalizer.fit(self.stream[:self.split[0]]) \
            if self.split[0] else None
        report = run_prequential(self.learner, self.stream, self.oracle,
                                 self.split, normalizer=normalizer,
                                 seed=self.seed,
                                 per_sample=self._after_sample)
        with self.lock:
            self.report = report
        self.done.set()
        self.publish({"type": "state", "state": self.state_json()})
        return report

    def _after_sample(self, outcome) -> None:
        with self.lock:
            model = self.learner.model
            self._rule_trace.append([outcome.index, model.n_rules])
            self._weight_trace.append([outcome.index]
                                      + [float(w) for w in model.weights])
            events = self.learner.events[self._events_published:]
            self._events_published = len(self.learner.events)
        for event in events:
            self.publish({"type": "event", "event": event})
        if outcome.labeled or outcome.index % 25 == 0:
            self.publish({"type": "state", "state": self.state_json()})
        if self.pace_s > 0.0:
            time.sleep(self.pace_s)

    # -- views -------------------------------------------------------------

    def state_json(self) -> dict:
        with self.lock:
            model = self.learner.model
            return {
                "rules": model.n_rules,
                "samples_seen": model.n_seen,
                "labeled": self.learner.labeled_count,
                "budget_spent": float(model.selection.spent),
                "theta": float(model.selection.theta),
                "archived": len(model.archive),
                "reserved": len(self.learner.buffer),
                "done": self.done.is_set(),
                "classes": self.class_names,
                "features": self.feature_names,
                "n_train": self.split[0],
                "n_test": self.split[1],
            }

    def query_json(self) -> Optional[dict]:
        with self.lock:
            if self.pending is None or self.pending.answered.is_set():
                return None
            return self.pending.to_json()

    def answer(self, query_id, label) -> tuple[bool, str]:
        with self.lock:
            pending = self.pending
            if pending is None or pending.answered.is_set():
                return False, "no pending query"
            if pending.id != query_id:
                return False, "stale query id"
            if time.time() > pending.deadline:
                return False, "query expired"
            if not isinstance(label, int) or not 0 <= label < self.learner.n_classes:
                return False, "class out of range"
            pending.label = label
            pending.answered.set()
            return True, "ok"

    def rule_trace_json(self) -> list:
        with self.lock:
            return [list(row) for row in self._rule_trace]

    def weight_trace_json(self) -> list:
        with self.lock:
            return [list(row) for row in self._weight_trace]

    def publish(self, message: dict) -> None:
        with self.lock:
            subscribers = list(self.subscribers)
        payload = json.dumps(message)
        for q in subscribers:
            try:
                q.put_nowait(payload)
            except queue.Full:
                pass

    def subscribe(self) -> queue.Queue:
        q = queue.Queue(maxsize=256)
        with self.lock:
            self.subscribers.append(q)
        return q

    def unsubscribe(self, q: queue.Queue) -> None:
        with self.lock:
            if q in self.subscribers:
                self.subscribers.remove(q)


class _Handler(BaseHTTPRequestHandler):
    server_version = "rclass/0.1"
    engine: EngineServer  # set by make_http_server

    # -- plumbing ------------------------------------------------------------

    def log_message(self, fmt, *args):
        pass

    def _send_json(self, payload, status=200):
        raw = json.dumps(payload).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(raw)))
        self.send_header("Access-Control-Allow-Origin", "*")
        self.end_headers()
        self.wfile.write(raw)

    def _read_body(self):
        length = int(self.headers.get("Content-Length", 0))
        if length <= 0:
            return None
        try:
            return json.loads(self.rfile.read(length).decode("utf-8"))
        except (ValueError, UnicodeDecodeError):
            return None

    # -- routes ----------------------------------------------------------

    def do_GET(self):
        engine = self.engine
        path = self.path.split("?", 1)[0]
        if path == "/state":
            self._send_json(engine.state_json())
        elif path == "/query":
            self._send_json(engine.query_json())
        elif path == "/trace/rules":
            self._send_json(engine.rule_trace_json())
        elif path == "/trace/weights":
            self._send_json(engine.weight_trace_json())
        elif path == "/events":
            with engine.lock:
                self._send_json(list(engine.learner.events))
        elif path == "/stream":
            self._serve_stream()
        elif path in ("/", "/index.html") and engine.static_dir:
            self._serve_static("index.html")
        elif engine.static_dir and not path.startswith("/."):
            self._serve_static(path.lstrip("/"))
        else:
            self._send_json({"error": "not found"}, status=404)

    def do_POST(self):
        engine = self.engine
        path = self.path.split("?", 1)[0]
        if path != "/labels":
            self._send_json({"error": "not found"}, status=404)
            return
        body = self._read_body()
        if not isinstance(body, dict) or "id" not in body or "class" not in body:
            self._send_json({"accepted": False, "error": "bad request"},
                            status=400)
            return
        accepted, reason = engine.answer(body.get("id"), body.get("class"))
        if accepted:
            self._send_json({"accepted": True})
        else:
            self._send_json({"accepted": False, "error": reason}, status=409)

    # -- helpers ------------------------------------------------------------

    def _serve_stream(self):
        engine = self.engine
        q = engine.subscribe()
        try:
            self.send_response(200)
            self.send_header("Content-Type", "text/event-stream")
            self.send_header("Cache-Control", "no-cache")
            self.send_header("Access-Control-Allow-Origin", "*")
            self.end_headers()
            self.wfile.write(b": connected\n\n")
            self.wfile.flush()
            while True:
                try:
                    payload = q.get(timeout=10.0)
                    self.wfile.write(f"data: {payload}\n\n".encode("utf-8"))
                except queue.Empty:
                    self.wfile.write(b": keepalive\n\n")
                self.wfile.flush()
                if engine.done.is_set() and q.empty():
                    break
        except (BrokenPipeError, ConnectionResetError, OSError):
            pass
        finally:
            engine.unsubscribe(q)

    def _serve_static(self, rel_path):
        base = Path(self.engine.static_dir).resolve()
        target = (base / rel_path).resolve()
        if not str(target).startswith(str(base)) or not target.is_file():
            self._send_json({"error": "not found"}, status=404)
            return
        ctype = {
            ".html": "text/html", ".js": "text/javascript",
            ".css": "text/css", ".json": "application/json",
            ".svg": "image/svg+xml",
        }.get(target.suffix, "application/octet-stream")
        raw = target.read_bytes()
        self.send_response(200)
        self.send_header("Content-Type", ctype)
        self.send_header("Content-Length", str(len(raw)))
        self.end_headers()
        self.wfile.write(raw)


def make_http_server(engine: EngineServer, host: str = "127.0.0.1",
                     port: int = 0) -> ThreadingHTTPServer:
    handler = type("BoundHandler", (_Handler,), {"engine": engine})
    server = ThreadingHTTPServer((host, port), handler)
    server.daemon_threads = True
    return server


def parse_bind(addr: str) -> tuple[str, int]:
    if ":" in addr:
        host, port = addr.rsplit(":", 1)
        return host or "127.0.0.1", int(port)
    return "127.0.0.1", int(addr)
