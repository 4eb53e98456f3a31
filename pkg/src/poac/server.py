"""Session workers, the session manager, and the two protocol transports.

Each session's engine is confined to one worker thread; protocol handlers
talk to it only through queues.  Bot sides act synchronously, so the
clock never waits on wall time in bot/self-play matches.  External
(including human) sides are turn-gated: the worker pushes an observation
whenever the side has agents that can act, then blocks until an ``act``
for that tick arrives — or, with a realtime budget configured, fills in
Empty actions on timeout.

Transports:

* a length-prefixed JSON protocol over TCP (one bidirectional socket per
  client), and
* an HTTP bridge carrying the same envelopes via long-polling, which is
  what the browser client uses; it also serves UI assets and replays.
"""

from __future__ import annotations

import json
import os
import queue
import socketserver
import threading
import time
import uuid
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

from . import __version__ as ENGINE_VERSION
from .bots import BOT_NAMES, make_policy
from .engine import Action, action_to_index, parse_action, reset
from .errors import ConfigError, PoacError, ProtocolError
from .observation import build_observation, feature_layout, render_state, team_views
from .protocol import ProtocolMessage, recv_message, send_message
from .replay import ReplayWriter, frames, read_file
from .rng import mix64
from .scenarios import load_scenario
from .units import BLUE, COLOR_NAMES, RED

DEFAULT_PORT = int(os.environ.get("POAC_PORT", "8040"))
MAX_SESSIONS = 64
CONTROLLER_NAMES = BOT_NAMES + ("external", "human")

_EXTERNAL = ("external", "human")


class _Outbox:
    """Ordered per-side message feed supporting long-poll and pumps."""

    def __init__(self):
        self._messages: list[dict] = []
        self._cond = threading.Condition()

    def push(self, msg: ProtocolMessage) -> None:
        with self._cond:
            self._messages.append(msg.to_dict())
            self._cond.notify_all()

    def poll(self, after: int, timeout: float | None) -> tuple[list[dict], int]:
        deadline = None if timeout is None else time.monotonic() + timeout
        with self._cond:
            while len(self._messages) <= after:
                remaining = None if deadline is None else deadline - time.monotonic()
                if remaining is not None and remaining <= 0:
                    return [], after
                self._cond.wait(remaining)
            batch = self._messages[after:]
            return batch, len(self._messages)


class Session:
    """One match; owns its engine on a dedicated worker thread."""

    def __init__(
        self,
        session_id: str,
        scenario_source,
        seed: int,
        red: str,
        blue: str,
        realtime_ms: int | None = None,
        record_path: str | None = None,
    ):
        for name, side in ((red, "red"), (blue, "blue")):
            if name not in CONTROLLER_NAMES:
                raise ConfigError(
                    f"controllers.{side}",
                    f"unknown controller {name!r} (expected one of {CONTROLLER_NAMES})",
                )
        self.id = session_id
        self.config = load_scenario(scenario_source)
        self.seed = seed
        self.controller_names = {RED: red, BLUE: blue}
        self.realtime_s = realtime_ms / 1000.0 if realtime_ms else None
        self.record_path = record_path
        self.state = "waiting"
        self.error: str | None = None
        self.engine = reset(self.config, seed)
        self.outboxes = {RED: _Outbox(), BLUE: _Outbox()}
        self.act_queues: dict[int, queue.Queue] = {RED: queue.Queue(), BLUE: queue.Queue()}
        self._policies = {}
        for color in (RED, BLUE):
            name = self.controller_names[color]
            if name not in _EXTERNAL:
                self._policies[color] = make_policy(
                    name, color, self.config, seed=mix64(seed, color)
                )
        self._thread = threading.Thread(target=self._run, daemon=True, name=f"session-{session_id}")

    def start(self) -> None:
        self.state = "running"
        self._thread.start()

    def join(self, timeout: float | None = None) -> None:
        self._thread.join(timeout)

    def descriptor(self) -> dict:
        return {
            "session": self.id,
            "scenario": self.config.name,
            "seed": self.seed,
            "red": self.controller_names[RED],
            "blue": self.controller_names[BLUE],
            "state": self.state,
            "tick": self.engine.tick,
            "winner": self.engine.winner,
            "realtime_ms": None if self.realtime_s is None else int(self.realtime_s * 1000),
            "error": self.error,
        }

    def external_sides(self) -> list[int]:
        return [c for c in (RED, BLUE) if self.controller_names[c] in _EXTERNAL]

    # -- worker ------------------------------------------------------------

    def _run(self) -> None:
        st = self.engine
        stream = open(self.record_path, "w", encoding="utf-8") if self.record_path else None
        writer = None
        if stream is not None:
            writer = ReplayWriter(
                self.config, self.seed,
                self.controller_names[RED], self.controller_names[BLUE],
                stream=stream,
            )
        try:
            while not st.terminated:
                actions: dict[int, Action] = {}
                for color in (RED, BLUE):
                    if color in self._policies:
                        views = team_views(st, color)
                        masks = {uid: st.available_actions(uid) for uid in views}
                        actions.update(self._policies[color].decide(views, masks))
                    else:
                        actions.update(self._gather_external(color))
                result = st.step(actions)
                if writer is not None:
                    writer.on_step(st, actions, result)
                for color in self.external_sides():
                    self._push(color, ProtocolMessage(
                        kind="step_result", session=self.id, tick=st.tick,
                        payload={
                            "reward_red": result.reward_red,
                            "reward_blue": result.reward_blue,
                            "events": result.events,
                            "render_state": render_state(st, color),
                        },
                    ))
            for color in self.external_sides():
                self._push(color, ProtocolMessage(
                    kind="episode_end", session=self.id, tick=st.tick,
                    payload={
                        "winner": st.winner,
                        "ticks": st.tick,
                        "final_bloods": [op.blood for op in st.ops],
                        "render_state": render_state(st, color),
                    },
                ))
            if writer is not None:
                replay_text = writer.finish(st)
                writer = None
                self._push_replay(replay_text)
            self.state = "finished"
        except Exception as exc:  # push the failure to clients, then land
            self.error = str(exc)
            self.state = "finished"
            for color in self.external_sides():
                self._push(color, ProtocolMessage(
                    kind="error", session=self.id, tick=st.tick,
                    payload={"message": f"session aborted: {exc}"},
                ))
        finally:
            if writer is not None:
                writer.finish(st)
            if stream is not None:
                stream.close()

    def _push(self, color: int, msg: ProtocolMessage) -> None:
        self.outboxes[color].push(msg)

    def _push_replay(self, text: str, chunk_size: int = 32768) -> None:
        """Stream the finished recording to external sides as replay_chunk
        messages so clients need not fetch the file separately."""
        name = os.path.basename(self.record_path or f"{self.id}.poacrep")
        pieces = [text[i:i + chunk_size] for i in range(0, len(text), chunk_size)] or [""]
        for color in self.external_sides():
            for seq, piece in enumerate(pieces):
                self._push(color, ProtocolMessage(
                    kind="replay_chunk", session=self.id, tick=self.engine.tick,
                    payload={
                        "name": name,
                        "seq": seq,
                        "data": piece,
                        "last": seq == len(pieces) - 1,
                    },
                ))

    def _gather_external(self, color: int) -> dict[int, Action]:
        st = self.engine
        decidable = st.decidable_uids(color)
        if not decidable:
            return {}
        agents = {}
        for op in st.team(color):
            if op.alive:
                agents[str(op.uid)] = {
                    "vector": build_observation(st, op.uid),
                    "mask": st.available_actions(op.uid),
                }
        self._push(color, ProtocolMessage(
            kind="observation", session=self.id, tick=st.tick,
            payload={
                "side": COLOR_NAMES[color],
                "agents": agents,
                "decidable": decidable,
                "render_state": render_state(st, color),
            },
        ))
        while True:
            try:
                msg = self.act_queues[color].get(timeout=self.realtime_s)
            except queue.Empty:
                return {uid: Action.empty() for uid in decidable}
            problem = None
            parsed: dict[int, Action] = {}
            if msg.get("tick") != st.tick:
                problem = f"stale act for tick {msg.get('tick')}, expected {st.tick}"
            else:
                try:
                    for uid_text, action_text in (msg.get("actions") or {}).items():
                        parsed[int(uid_text)] = parse_action(action_text)
                except (ValueError, PoacError) as exc:
                    problem = f"malformed actions: {exc}"
            if problem is None:
                problem = self._check_side_actions(color, decidable, parsed)
            if problem is None:
                self._push(color, ProtocolMessage(
                    kind="act_ack", session=self.id, tick=st.tick,
                    payload={"accepted": sorted(parsed)},
                ))
                return parsed
            self._push(color, ProtocolMessage(
                kind="error", session=self.id, tick=st.tick,
                payload={"message": problem},
            ))

    def _check_side_actions(self, color, decidable, parsed) -> str | None:
        st = self.engine
        for uid in decidable:
            if uid not in parsed:
                return f"missing action for operator {uid}"
        for uid, action in parsed.items():
            if not (0 <= uid < len(st.ops)) or st.ops[uid].color != color:
                return f"operator {uid} is not on your side"
            if uid not in decidable:
                if action.kind != "empty":
                    return f"operator {uid} can only submit empty"
                continue
            try:
                index = action_to_index(action, color, st.team_size)
            except PoacError as exc:
                return str(exc)
            if not st.available_actions(uid)[index]:
                return f"operator {uid}: action unavailable this tick"
        return None


class SessionManager:
    def __init__(self, realtime_ms: int | None = None, record_dir: str | None = None):
        self._sessions: dict[str, Session] = {}
        self._lock = threading.Lock()
        self.realtime_ms = realtime_ms
        self.record_dir = record_dir

    def create_session(
        self,
        scenario_source,
        seed: int,
        red: str,
        blue: str,
        realtime_ms: int | None = None,
        record: bool = False,
    ) -> Session:
        with self._lock:
            live = sum(1 for s in self._sessions.values() if s.state != "finished")
            if live >= MAX_SESSIONS:
                raise ConfigError("sessions", f"capacity of {MAX_SESSIONS} live sessions exceeded")
            session_id = uuid.uuid4().hex[:12]
            record_path = None
            if record and self.record_dir:
                os.makedirs(self.record_dir, exist_ok=True)
                record_path = os.path.join(self.record_dir, f"{session_id}.poacrep")
            session = Session(
                session_id, scenario_source, seed, red, blue,
                realtime_ms=realtime_ms if realtime_ms is not None else self.realtime_ms,
                record_path=record_path,
            )
            self._sessions[session_id] = session
        session.start()
        return session

    def get(self, session_id: str) -> Session:
        try:
            return self._sessions[session_id]
        except KeyError:
            raise ProtocolError(f"unknown session {session_id!r}") from None

    def list_sessions(self) -> list[dict]:
        with self._lock:
            return [s.descriptor() for s in self._sessions.values()]

    def act(self, session_id: str, side: str, tick, actions: dict) -> None:
        session = self.get(session_id)
        color = _side_color(side)
        if session.controller_names[color] not in _EXTERNAL:
            raise ProtocolError(f"side {side} is not externally controlled")
        session.act_queues[color].put({"tick": tick, "actions": actions})

    def poll(self, session_id: str, side: str, after: int, timeout: float) -> tuple[list[dict], int]:
        session = self.get(session_id)
        return session.outboxes[_side_color(side)].poll(after, timeout)


def _side_color(side: str) -> int:
    if side == "red":
        return RED
    if side == "blue":
        return BLUE
    raise ProtocolError(f"unknown side {side!r}")


# ---------------------------------------------------------------------------
# TCP transport

class TcpProtocolServer(socketserver.ThreadingTCPServer):
    allow_reuse_address = True
    daemon_threads = True

    def __init__(self, address, manager: SessionManager):
        super().__init__(address, _TcpHandler)
        self.manager = manager


class _TcpHandler(socketserver.BaseRequestHandler):
    def handle(self):
        manager: SessionManager = self.server.manager
        sock = self.request
        attached: tuple[str, str] | None = None
        pump: threading.Thread | None = None
        stop = threading.Event()
        try:
            while True:
                msg = recv_message(sock)
                if msg is None:
                    return
                try:
                    reply, attach = self._dispatch(manager, msg)
                except PoacError as exc:
                    send_message(sock, ProtocolMessage(
                        kind="error", session=msg.session, tick=msg.tick,
                        payload={"message": str(exc)},
                    ))
                    continue
                if reply is not None:
                    send_message(sock, reply)
                if attach is not None and attached is None:
                    attached = attach
                    pump = threading.Thread(
                        target=self._pump, args=(manager, attach, sock, stop), daemon=True
                    )
                    pump.start()
        except (ConnectionError, ProtocolError, OSError):
            pass
        finally:
            stop.set()

    def _dispatch(self, manager, msg: ProtocolMessage):
        if msg.kind == "hello":
            session_id = msg.payload.get("session") or msg.session
            side = msg.payload.get("side")
            if session_id and side:
                session = manager.get(session_id)
                reply = ProtocolMessage(
                    kind="session_created", session=session.id,
                    payload={**session.descriptor(), "your_side": side},
                )
                return reply, (session.id, side)
            return ProtocolMessage(kind="hello", payload={"server": "poac", "version": ENGINE_VERSION}), None
        if msg.kind == "create_session":
            p = msg.payload
            session = manager.create_session(
                p.get("scenario", 0), int(p.get("seed", 0)),
                p.get("red", "KAI0"), p.get("blue", "KAI0"),
                realtime_ms=p.get("realtime_ms"), record=bool(p.get("record")),
            )
            your_side = p.get("side")
            if your_side is None:
                external = session.external_sides()
                your_side = COLOR_NAMES[external[0]] if external else None
            reply = ProtocolMessage(
                kind="session_created", session=session.id,
                payload={**session.descriptor(), "your_side": your_side},
            )
            return reply, ((session.id, your_side) if your_side else None)
        if msg.kind == "act":
            manager.act(msg.session, msg.payload.get("side"), msg.tick, msg.payload.get("actions") or {})
            return None, None  # ack comes from the session worker
        raise ProtocolError(f"unexpected client message kind {msg.kind!r}")

    def _pump(self, manager, attach, sock, stop: threading.Event):
        session_id, side = attach
        cursor = 0
        try:
            while not stop.is_set():
                batch, cursor = manager.poll(session_id, side, cursor, timeout=0.5)
                for doc in batch:
                    send_message(sock, ProtocolMessage.from_dict(doc))
        except (ConnectionError, OSError, ProtocolError):
            pass


# ---------------------------------------------------------------------------
# HTTP bridge (long-polling + UI assets + replays)

_CONTENT_TYPES = {
    ".html": "text/html; charset=utf-8",
    ".js": "text/javascript; charset=utf-8",
    ".css": "text/css; charset=utf-8",
    ".json": "application/json",
    ".map": "application/json",
    ".svg": "image/svg+xml",
    ".png": "image/png",
    ".ico": "image/x-icon",
}


class HttpBridge(ThreadingHTTPServer):
    daemon_threads = True

    def __init__(self, address, manager: SessionManager, ui_dir: str | None = None,
                 replay_dir: str | None = None):
        super().__init__(address, _HttpHandler)
        self.manager = manager
        self.ui_dir = os.path.abspath(ui_dir) if ui_dir else None
        self.replay_dir = os.path.abspath(replay_dir) if replay_dir else None


class _HttpHandler(BaseHTTPRequestHandler):
    protocol_version = "HTTP/1.1"

    def log_message(self, *args):  # quiet by default
        pass

    # -- plumbing ----------------------------------------------------------

    def _json(self, status: int, body) -> None:
        data = json.dumps(body).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(data)))
        self.send_header("Access-Control-Allow-Origin", "*")
        self.end_headers()
        self.wfile.write(data)

    def _error(self, status: int, message: str) -> None:
        self._json(status, {"error": message})

    def _body(self) -> dict:
        length = int(self.headers.get("Content-Length") or 0)
        if length == 0:
            return {}
        try:
            return json.loads(self.rfile.read(length).decode("utf-8"))
        except json.JSONDecodeError as exc:
            raise ProtocolError(f"malformed JSON body: {exc}") from None

    def _query(self) -> dict:
        from urllib.parse import parse_qs, urlparse

        return {k: v[-1] for k, v in parse_qs(urlparse(self.path).query).items()}

    def _route(self) -> list[str]:
        from urllib.parse import urlparse

        return [p for p in urlparse(self.path).path.split("/") if p]

    # -- handlers ------------------------------------------------------------

    def do_POST(self):
        manager: SessionManager = self.server.manager
        parts = self._route()
        try:
            if parts[:2] == ["api", "sessions"] and len(parts) == 2:
                p = self._body()
                session = manager.create_session(
                    p.get("scenario", 0), int(p.get("seed", 0)),
                    p.get("red", "human"), p.get("blue", "KAI0"),
                    realtime_ms=p.get("realtime_ms"), record=bool(p.get("record")),
                )
                self._json(200, session.descriptor())
                return
            if parts[:2] == ["api", "sessions"] and len(parts) == 4 and parts[3] == "act":
                p = self._body()
                manager.act(parts[2], p.get("side"), p.get("tick"), p.get("actions") or {})
                self._json(200, {"queued": True})
                return
            self._error(404, f"no such endpoint: POST /{'/'.join(parts)}")
        except (PoacError, ValueError) as exc:
            self._error(400, str(exc))

    def do_GET(self):
        manager: SessionManager = self.server.manager
        parts = self._route()
        query = self._query()
        try:
            if parts[:2] == ["api", "sessions"] and len(parts) == 2:
                self._json(200, manager.list_sessions())
            elif parts[:2] == ["api", "sessions"] and len(parts) == 3:
                self._json(200, manager.get(parts[2]).descriptor())
            elif parts[:2] == ["api", "sessions"] and len(parts) == 4 and parts[3] == "messages":
                timeout = min(float(query.get("timeout", "25")), 55.0)
                batch, cursor = manager.poll(
                    parts[2], query.get("side", "red"), int(query.get("after", "0")), timeout
                )
                self._json(200, {"messages": batch, "next": cursor})
            elif parts == ["api", "scenarios"]:
                self._json(200, [load_scenario(i).to_document() | {"scenario_id": i} for i in range(6)])
            elif parts == ["api", "features"]:
                self._json(200, feature_layout(3))
            elif parts == ["api", "replays"]:
                self._json(200, self._replay_names())
            elif parts[:2] == ["api", "replays"] and len(parts) == 3:
                record = read_file(self._replay_path(parts[2]))
                from .replay import write as replay_write

                self._json(200, {"name": parts[2], "text": replay_write(record)})
            elif parts[:2] == ["api", "replays"] and len(parts) == 4 and parts[3] == "frames":
                record = read_file(self._replay_path(parts[2]))
                self._json(200, frames(record, query.get("side", "all")))
            elif self.server.ui_dir:
                self._static(parts)
            else:
                self._error(404, "no UI assets configured")
        except FileNotFoundError:
            self._error(404, "not found")
        except (PoacError, ValueError) as exc:
            self._error(400, str(exc))

    def _replay_names(self) -> list[str]:
        root = self.server.replay_dir
        if not root or not os.path.isdir(root):
            return []
        return sorted(n for n in os.listdir(root) if n.endswith(".poacrep"))

    def _replay_path(self, name: str) -> str:
        root = self.server.replay_dir
        if not root:
            raise ProtocolError("no replay directory configured")
        path = os.path.abspath(os.path.join(root, name))
        if not path.startswith(root + os.sep) or not name.endswith(".poacrep"):
            raise ProtocolError("invalid replay name")
        if not os.path.exists(path):
            raise FileNotFoundError(name)
        return path

    def _static(self, parts: list[str]) -> None:
        root = self.server.ui_dir
        rel = "/".join(parts) or "index.html"
        path = os.path.abspath(os.path.join(root, rel))
        if not path.startswith(root + os.sep) and path != root:
            self._error(403, "forbidden")
            return
        if os.path.isdir(path):
            path = os.path.join(path, "index.html")
        if not os.path.exists(path):
            self._error(404, "not found")
            return
        ext = os.path.splitext(path)[1].lower()
        with open(path, "rb") as fh:
            data = fh.read()
        self.send_response(200)
        self.send_header("Content-Type", _CONTENT_TYPES.get(ext, "application/octet-stream"))
        self.send_header("Content-Length", str(len(data)))
        self.end_headers()
        self.wfile.write(data)


def serve(
    port: int = DEFAULT_PORT,
    ui_dir: str | None = None,
    replay_dir: str | None = None,
    realtime_ms: int | None = None,
    block: bool = True,
):
    """Host the HTTP bridge on ``port`` and the TCP protocol on ``port+1``."""
    manager = SessionManager(realtime_ms=realtime_ms, record_dir=replay_dir)
    http_server = HttpBridge(("0.0.0.0", port), manager, ui_dir=ui_dir, replay_dir=replay_dir)
    tcp_server = TcpProtocolServer(("0.0.0.0", port + 1), manager)
    tcp_thread = threading.Thread(target=tcp_server.serve_forever, daemon=True, name="tcp-protocol")
    tcp_thread.start()
    if not block:
        http_thread = threading.Thread(target=http_server.serve_forever, daemon=True, name="http-bridge")
        http_thread.start()
        return manager, http_server, tcp_server
    try:
        http_server.serve_forever()
    finally:
        tcp_server.shutdown()
    return manager, http_server, tcp_server
