"""Logic-node server: one FSM loop serving N display clients.

One acceptor thread, one reader and one writer thread per client; the
reader only enqueues UiEvents and the writer only drains a bounded
per-client outbound queue (drop-oldest-snapshot when full), so all
state mutation stays on the FSM thread and the FSM never blocks on a
slow client. Three transports share the port: newline-delimited JSON
over a plain stream, RFC 6455 WebSocket for browsers, and plain HTTP
GET for the static web client files.
"""

from __future__ import annotations

import collections
import json
import socket
import threading
import time
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Any, Callable

from . import protocol
from .interaction import HostAdapter, bundled_layouts_path
from .protocol import (
    ClientSession,
    HandshakeError,
    LineAssembler,
    Message,
    ProtocolError,
    SequenceError,
    WebSocketAssembler,
    websocket_encode_text,
    websocket_handshake_response,
)
from .runtime import Runtime
from .session_log import SessionLog
from .state_machine import SessionContext, StateSnapshot, UiEvent

_CONTENT_TYPES = {
    ".html": "text/html; charset=utf-8",
    ".js": "text/javascript; charset=utf-8",
    ".mjs": "text/javascript; charset=utf-8",
    ".css": "text/css; charset=utf-8",
    ".json": "application/json",
    ".map": "application/json",
    ".png": "image/png",
    ".svg": "image/svg+xml",
}


@dataclass
class ServerConfig:
    host: str = "127.0.0.1"
    port: int = 8765
    heartbeat_interval_ms: int = 2000
    heartbeat_misses: int = 3
    outbound_queue_size: int = 64
    tick_interval_ms: int = 100
    web_root: Path | None = None
    layouts_path: Path | None = None
    log_path: Path | None = None
    host_outbox_path: Path | None = None


class _Connection:
    """One client socket with its framing, queue, and threads."""

    def __init__(self, server: "LogicServer", sock: socket.socket, peer: str):
        self.server = server
        self.sock = sock
        self.peer = peer
        self.websocket = False
        self.session: ClientSession | None = None
        self.queue: collections.deque[Message] = collections.deque()
        self.lock = threading.Lock()
        self.ready = threading.Condition(self.lock)
        self.closed = False

    # -- outbound ---------------------------------------------------------

    def send(self, build: Callable[[ClientSession], Message]) -> None:
        """Assign the next seq and enqueue under the connection lock.

        When the bounded queue is full the oldest Snapshot in it is
        dropped first; the newest snapshot always supersedes older ones.
        """
        with self.lock:
            if self.closed or self.session is None:
                return
            msg = build(self.session)
            if len(self.queue) >= self.server.config.outbound_queue_size:
                for i, queued in enumerate(self.queue):
                    if queued.kind == "Snapshot":
                        del self.queue[i]
                        break
                else:
                    self.queue.popleft()
            self.queue.append(msg)
            self.ready.notify()

    def write_loop(self) -> None:
        while True:
            with self.lock:
                while not self.queue and not self.closed:
                    self.ready.wait(timeout=0.5)
                if self.closed and not self.queue:
                    return
                msg = self.queue.popleft() if self.queue else None
            if msg is None:
                continue
            try:
                data = protocol.encode(msg)
                if self.websocket:
                    data = websocket_encode_text(data)
                self.sock.sendall(data)
            except OSError:
                self.server._drop_connection(self, "send failure")
                return

    def close(self) -> None:
        with self.lock:
            if self.closed:
                return
            self.closed = True
            self.ready.notify_all()
        try:
            self.sock.shutdown(socket.SHUT_RDWR)
        except OSError:
            pass
        self.sock.close()


class LogicServer:
    """Runs the FSM event loop and the state-broadcast protocol."""

    def __init__(self, config: ServerConfig | None = None,
                 ctx: SessionContext | None = None):
        self.config = config or ServerConfig()
        self.session_id = f"session-{int(time.time())}"
        host_adapter = HostAdapter(enabled=True,
                                   sink_path=self.config.host_outbox_path)
        self.runtime = Runtime(
            ctx=ctx,
            log=SessionLog(self.config.log_path),
            host=host_adapter,
            broadcaster=self._broadcast,
            transcript=self._transcript,
            on_calibration=self._calibration_cue,
        )
        self._connections: list[_Connection] = []
        self._connections_lock = threading.Lock()
        self._inbound: collections.deque[UiEvent] = collections.deque()
        self._inbound_ready = threading.Event()
        self._stop = threading.Event()
        self._t0 = time.monotonic()
        self._listener: socket.socket | None = None
        self._threads: list[threading.Thread] = []
        self.transcript_lines: list[dict[str, Any]] = []

    # -- lifecycle --------------------------------------------------------

    @property
    def port(self) -> int:
        assert self._listener is not None
        return self._listener.getsockname()[1]

    def now_ms(self) -> int:
        return int((time.monotonic() - self._t0) * 1000)

    def start(self) -> None:
        listener = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
        listener.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        listener.bind((self.config.host, self.config.port))
        listener.listen(16)
        self._listener = listener
        self.runtime.start(self.now_ms())
        for target, name in ((self._accept_loop, "accept"),
                             (self._fsm_loop, "fsm"),
                             (self._heartbeat_loop, "heartbeat")):
            thread = threading.Thread(target=target, name=f"bciui-{name}", daemon=True)
            thread.start()
            self._threads.append(thread)

    def stop(self) -> None:
        """Clean shutdown: final snapshot broadcast, well-nested log."""
        if self._stop.is_set():
            return
        self._stop.set()
        self._inbound_ready.set()
        self.runtime.shutdown(self.now_ms())
        if self.runtime.host is not None:
            self.runtime.host.close()
        if self._listener is not None:
            self._listener.close()
        time.sleep(0.05)  # let writers flush the final snapshot
        with self._connections_lock:
            connections = list(self._connections)
        for conn in connections:
            conn.close()

    def serve_forever(self, poll_s: float = 0.2) -> None:
        while not self._stop.is_set():
            time.sleep(poll_s)

    # -- FSM thread -------------------------------------------------------

    def submit_event(self, event: UiEvent) -> None:
        self._inbound.append(event)
        self._inbound_ready.set()

    def _fsm_loop(self) -> None:
        while not self._stop.is_set():
            self._inbound_ready.wait(timeout=self.config.tick_interval_ms / 1000.0)
            self._inbound_ready.clear()
            while self._inbound:
                event = self._inbound.popleft()
                # Arrival-order serialization: the server clock stamps
                # every event so FSM timestamps are monotonic across clients.
                self.runtime.submit(replace(event, timestamp_ms=self.now_ms()))
            self.runtime.tick(self.now_ms())

    # -- broadcast / effects ----------------------------------------------

    def _broadcast(self, snapshot: StateSnapshot) -> None:
        doc = snapshot.to_dict()
        with self._connections_lock:
            connections = list(self._connections)
        for conn in connections:
            if conn.session is not None:
                conn.send(lambda s, doc=doc: protocol.snapshot_message(s, doc))

    def _calibration_cue(self, modality: str) -> None:
        with self._connections_lock:
            connections = list(self._connections)
        for conn in connections:
            if conn.session is not None:
                conn.send(lambda s, m=modality: protocol.calibration_message(s, m))

    def _transcript(self, line: dict[str, Any]) -> None:
        self.transcript_lines.append(line)

    # -- accept / per-client threads ---------------------------------------

    def _accept_loop(self) -> None:
        assert self._listener is not None
        while not self._stop.is_set():
            try:
                sock, addr = self._listener.accept()
            except OSError:
                return
            conn = _Connection(self, sock, f"{addr[0]}:{addr[1]}")
            thread = threading.Thread(target=self._read_loop, args=(conn,),
                                      name=f"bciui-read-{conn.peer}", daemon=True)
            thread.start()

    def _read_loop(self, conn: _Connection) -> None:
        sock = conn.sock
        try:
            first = sock.recv(4096)
        except OSError:
            conn.close()
            return
        if not first:
            conn.close()
            return

        if first.startswith((b"GET ", b"HEAD", b"POST")):
            remainder = self._handle_http(conn, first)
            if remainder is None:
                return  # plain HTTP request served and closed
            assembler: LineAssembler | WebSocketAssembler = WebSocketAssembler()
            conn.websocket = True
            pending = assembler.feed(remainder) if remainder else []
        else:
            assembler = LineAssembler()
            try:
                pending = assembler.feed(first)
            except ProtocolError:
                conn.close()
                return

        writer = threading.Thread(target=conn.write_loop,
                                  name=f"bciui-write-{conn.peer}", daemon=True)
        writer_started = False
        try:
            while not self._stop.is_set():
                for msg in pending:
                    if conn.session is None:
                        session = protocol.accept_hello(msg, self.now_ms())
                        with conn.lock:
                            conn.session = session
                        with self._connections_lock:
                            self._connections.append(conn)
                        writer.start()
                        writer_started = True
                        conn.send(lambda s: protocol.make_ack(s, self.session_id))
                        # Late joiners get a full snapshot before any
                        # incremental message.
                        doc = self.runtime.snapshot.to_dict()
                        conn.send(lambda s, doc=doc: protocol.snapshot_message(s, doc))
                        self.submit_event(UiEvent.client_connected(
                            self.now_ms(), session.id))
                        continue
                    self._handle_client_message(conn, msg)
                if isinstance(assembler, WebSocketAssembler) and assembler.closed:
                    break
                try:
                    chunk = sock.recv(4096)
                except OSError:
                    break
                if not chunk:
                    break
                if conn.session is not None:
                    conn.session.last_inbound_ms = self.now_ms()
                try:
                    pending = assembler.feed(chunk)
                except ProtocolError:
                    if conn.session is not None:
                        conn.send(lambda s: protocol.make_error(s, "malformed message"))
                    pending = []
        except HandshakeError as exc:
            try:
                err = protocol.encode(Message("Error", 1, {"reason": str(exc)}))
                if conn.websocket:
                    err = websocket_encode_text(err)
                sock.sendall(err)
            except OSError:
                pass
        finally:
            self._drop_connection(conn, "reader finished")
            if writer_started:
                writer.join(timeout=1.0)

    def _handle_client_message(self, conn: _Connection, msg: Message) -> None:
        assert conn.session is not None
        try:
            event = protocol.ingest(conn.session, msg)
        except SequenceError as exc:
            conn.send(lambda s, r=str(exc): protocol.make_error(s, r))
            return
        except ProtocolError as exc:
            conn.send(lambda s, r=str(exc): protocol.make_error(s, r))
            return
        if event is not None:
            before = len(self.runtime.rejected_events)
            self.submit_event(event)
            # Rejection feedback is asynchronous; poll cheaply after the
            # FSM thread runs. Stale-event errors never change FSM state.
            def _report_rejection(count_before: int = before,
                                  target: _Connection = conn) -> None:
                time.sleep(self.config.tick_interval_ms / 1000.0)
                new = self.runtime.rejected_events[count_before:]
                for _, reason in new:
                    target.send(lambda s, r=reason: protocol.make_error(s, r))
            if conn.session.input_capable:
                threading.Thread(target=_report_rejection, daemon=True).start()

    def _drop_connection(self, conn: _Connection, reason: str) -> None:
        with self._connections_lock:
            if conn in self._connections:
                self._connections.remove(conn)
        if conn.session is not None:
            conn.session.alive = False
        conn.close()

    # -- heartbeats ---------------------------------------------------------

    def _heartbeat_loop(self) -> None:
        interval_s = self.config.heartbeat_interval_ms / 1000.0
        dead_after_ms = self.config.heartbeat_interval_ms * self.config.heartbeat_misses
        while not self._stop.is_set():
            time.sleep(interval_s)
            now = self.now_ms()
            with self._connections_lock:
                connections = list(self._connections)
            for conn in connections:
                session = conn.session
                if session is None:
                    continue
                if now - session.last_inbound_ms > dead_after_ms:
                    self._drop_connection(conn, "heartbeat timeout")
                else:
                    conn.send(protocol.make_heartbeat)

    # -- HTTP/WebSocket upgrade ---------------------------------------------

    def _handle_http(self, conn: _Connection, first: bytes) -> bytes | None:
        """Serve a static GET, or upgrade to WebSocket.

        Returns any bytes that arrived after the upgrade request (the
        start of the WebSocket stream), or None if the connection was a
        plain HTTP request and has been served and closed.
        """
        data = bytearray(first)
        while b"\r\n\r\n" not in data:
            try:
                chunk = conn.sock.recv(4096)
            except OSError:
                conn.close()
                return None
            if not chunk:
                conn.close()
                return None
            data.extend(chunk)
        head, _, remainder = bytes(data).partition(b"\r\n\r\n")
        lines = head.decode("latin-1").split("\r\n")
        request_line = lines[0]
        headers = {}
        for line in lines[1:]:
            if ":" in line:
                name, _, value = line.partition(":")
                headers[name.strip().lower()] = value.strip()

        parts = request_line.split()
        method = parts[0] if parts else ""
        path = parts[1] if len(parts) > 1 else "/"

        if headers.get("upgrade", "").lower() == "websocket":
            try:
                conn.sock.sendall(websocket_handshake_response(headers))
            except (OSError, HandshakeError):
                conn.close()
                return None
            return remainder

        if method != "GET":
            self._http_response(conn, 405, b"method not allowed")
            return None
        self._serve_static(conn, path.split("?")[0])
        return None

    def _serve_static(self, conn: _Connection, path: str) -> None:
        if path == "/layouts.json":
            layouts = self.config.layouts_path or bundled_layouts_path()
            body = Path(layouts).read_bytes()
            self._http_response(conn, 200, body, "application/json")
            return
        if path == "/snapshot.json":
            body = json.dumps(self.runtime.snapshot.to_dict()).encode("utf-8")
            self._http_response(conn, 200, body, "application/json")
            return
        root = self.config.web_root
        if root is None:
            self._http_response(conn, 404, b"no web root configured")
            return
        rel = path.lstrip("/") or "index.html"
        target = (root / rel).resolve()
        root = root.resolve()
        if not str(target).startswith(str(root)) or not target.is_file():
            self._http_response(conn, 404, b"not found")
            return
        ctype = _CONTENT_TYPES.get(target.suffix, "application/octet-stream")
        self._http_response(conn, 200, target.read_bytes(), ctype)

    def _http_response(self, conn: _Connection, status: int, body: bytes,
                       content_type: str = "text/plain") -> None:
        reason = {200: "OK", 404: "Not Found", 405: "Method Not Allowed"}.get(
            status, "OK")
        head = (f"HTTP/1.1 {status} {reason}\r\n"
                f"Content-Type: {content_type}\r\n"
                f"Content-Length: {len(body)}\r\n"
                "Connection: close\r\n\r\n").encode("ascii")
        try:
            conn.sock.sendall(head + body)
        except OSError:
            pass
        conn.close()
