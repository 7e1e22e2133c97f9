"""Logic-node / graphics-node wire protocol.

Every message is one JSON document per line:

    {"kind": ..., "seq": ..., "payload": {...}}

seq increases strictly per direction per connection. The handshake is
Hello(client id, capabilities) -> Ack(protocol version, session id),
after which the server immediately sends a full Snapshot so late
joiners render before any incremental traffic. Two framings carry the
same documents: newline-delimited text over a plain stream socket, and
RFC 6455 text frames for browser clients.
"""

from __future__ import annotations

import base64
import hashlib
import json
import struct
from dataclasses import dataclass, field
from typing import Any, Mapping, Sequence

from .state_machine import UiEvent, normalize_event

PROTOCOL_VERSION = "bci-ui/1"

MESSAGE_KINDS = frozenset({
    "Hello", "Snapshot", "PartialWords", "CandidateList", "HistoryList",
    "CalibrationCue", "Ack", "ClientEvent", "Heartbeat", "Error",
})


class ProtocolError(Exception):
    """Base class for protocol violations."""


class DecodeError(ProtocolError):
    """Malformed bytes; carries the byte offset of the failure."""

    def __init__(self, message: str, offset: int = 0):
        super().__init__(f"{message} (offset {offset})")
        self.offset = offset


class UnknownKindError(ProtocolError):
    """Message kind outside this protocol version."""


class HandshakeError(ProtocolError):
    """Traffic before Hello, or a malformed Hello; close the connection."""


class SequenceError(ProtocolError):
    """Non-monotonic client seq; drop the message, keep the connection."""


@dataclass(frozen=True)
class Message:
    kind: str
    seq: int
    payload: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.kind not in MESSAGE_KINDS:
            raise UnknownKindError(
                f"unknown message kind {self.kind!r} for {PROTOCOL_VERSION}")


def encode(msg: Message) -> bytes:
    doc = {"kind": msg.kind, "seq": msg.seq, "payload": msg.payload}
    return (json.dumps(doc, separators=(",", ":"), sort_keys=True) + "\n").encode("utf-8")


def decode(data: bytes) -> Message:
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise DecodeError(f"invalid utf-8: {exc.reason}", exc.start) from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DecodeError(f"invalid JSON: {exc.msg}", exc.pos) from exc
    if not isinstance(doc, dict):
        raise DecodeError("message must be a JSON object")
    try:
        kind = doc["kind"]
        seq = int(doc["seq"])
        payload = doc.get("payload", {})
    except (KeyError, TypeError, ValueError) as exc:
        raise DecodeError(f"missing or malformed envelope field: {exc}") from exc
    if not isinstance(payload, dict):
        raise DecodeError("payload must be a JSON object")
    if not isinstance(kind, str) or kind not in MESSAGE_KINDS:
        raise UnknownKindError(f"unknown message kind {kind!r} for {PROTOCOL_VERSION}")
    return Message(kind=kind, seq=seq, payload=payload)


@dataclass
class ClientSession:
    """Per-connection bookkeeping; ids are unique among live connections."""

    id: str
    capabilities: str = "render"  # "render" | "input"
    connected_at_ms: int = 0
    last_seen_seq: int = 0
    last_inbound_ms: int = 0
    alive: bool = True
    _out_seq: int = 0

    def next_out_seq(self) -> int:
        self._out_seq += 1
        return self._out_seq

    @property
    def input_capable(self) -> bool:
        return self.capabilities == "input"


def make_hello(seq: int, client_id: str, capabilities: str = "render") -> Message:
    return Message("Hello", seq, {"client_id": client_id,
                                  "capabilities": capabilities})


def make_ack(session: ClientSession, session_id: str) -> Message:
    return Message("Ack", session.next_out_seq(), {
        "protocol": PROTOCOL_VERSION, "session_id": session_id,
        "client_id": session.id,
    })


def make_error(session: ClientSession, reason: str) -> Message:
    return Message("Error", session.next_out_seq(), {"reason": reason})


def make_heartbeat(session: ClientSession) -> Message:
    return Message("Heartbeat", session.next_out_seq(), {})


def snapshot_message(session: ClientSession,
                     snapshot_doc: Mapping[str, Any]) -> Message:
    return Message("Snapshot", session.next_out_seq(), dict(snapshot_doc))


def calibration_message(session: ClientSession, modality: str) -> Message:
    return Message("CalibrationCue", session.next_out_seq(), {"modality": modality})


def broadcast(snapshot_doc: Mapping[str, Any],
              sessions: Sequence[ClientSession]) -> list[tuple[ClientSession, Message]]:
    """One Snapshot per connected client with its own next seq.

    Render-only and input-capable clients receive identical payloads.
    """
    out = []
    for session in sessions:
        if session.alive:
            out.append((session, snapshot_message(session, snapshot_doc)))
    return out


def accept_hello(msg: Message, now_ms: int) -> ClientSession:
    if msg.kind != "Hello":
        raise HandshakeError(f"expected Hello, got {msg.kind}")
    client_id = msg.payload.get("client_id")
    if not client_id or not isinstance(client_id, str):
        raise HandshakeError("Hello must carry a client_id")
    capabilities = msg.payload.get("capabilities", "render")
    if capabilities not in ("render", "input"):
        raise HandshakeError(f"unknown capabilities {capabilities!r}")
    session = ClientSession(id=client_id, capabilities=capabilities,
                            connected_at_ms=now_ms, last_inbound_ms=now_ms)
    session.last_seen_seq = msg.seq
    return session


def ingest(session: ClientSession, msg: Message) -> UiEvent | None:
    """Map one client message to a UiEvent for the FSM queue.

    Heartbeats update liveness and yield None. ClientEvents map 1:1 to
    UiEvents attributed to the session's client id. A non-monotonic seq
    raises SequenceError (drop + Error reply, connection stays open).
    """
    if msg.seq <= session.last_seen_seq:
        raise SequenceError(
            f"seq {msg.seq} not greater than last seen {session.last_seen_seq}")
    session.last_seen_seq = msg.seq
    if msg.kind == "Heartbeat":
        return None
    if msg.kind != "ClientEvent":
        raise ProtocolError(f"unexpected client message kind {msg.kind}")
    if not session.input_capable:
        raise ProtocolError("render-only client sent an input event")
    try:
        event = UiEvent.from_dict(msg.payload["event"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ProtocolError(f"malformed ClientEvent payload: {exc}") from exc
    if event.client_id is None:
        event = UiEvent.from_dict({**msg.payload["event"], "client_id": session.id})
    normalized = normalize_event(event)
    if normalized is not event and event.client_id is not None:
        normalized = UiEvent.from_dict(
            {**normalized.to_dict(), "client_id": event.client_id})
    return normalized


def client_event(seq: int, event: UiEvent) -> Message:
    return Message("ClientEvent", seq, {"event": event.to_dict()})


class LineAssembler:
    """Splits a byte stream into newline-delimited messages."""

    def __init__(self) -> None:
        self._buffer = bytearray()

    def feed(self, data: bytes) -> list[Message]:
        self._buffer.extend(data)
        messages = []
        while True:
            idx = self._buffer.find(b"\n")
            if idx < 0:
                break
            line = bytes(self._buffer[:idx])
            del self._buffer[:idx + 1]
            if line.strip():
                messages.append(decode(line))
        return messages


# --- RFC 6455 framing (browser-compatible layer) -----------------------------

_WS_GUID = "258EAFA5-E914-47DA-95CA-C5AB0DC85B11"


def websocket_accept_key(client_key: str) -> str:
    digest = hashlib.sha1((client_key + _WS_GUID).encode("ascii")).digest()
    return base64.b64encode(digest).decode("ascii")


def websocket_handshake_response(headers: Mapping[str, str]) -> bytes:
    key = headers.get("sec-websocket-key")
    if not key:
        raise HandshakeError("missing Sec-WebSocket-Key")
    return (
        "HTTP/1.1 101 Switching Protocols\r\n"
        "Upgrade: websocket\r\n"
        "Connection: Upgrade\r\n"
        f"Sec-WebSocket-Accept: {websocket_accept_key(key)}\r\n"
        "\r\n"
    ).encode("ascii")


def websocket_encode_text(payload: bytes, mask: bool = False) -> bytes:
    """One FIN text frame; clients must mask, servers must not."""
    header = bytearray([0x81])
    length = len(payload)
    mask_bit = 0x80 if mask else 0x00
    if length < 126:
        header.append(mask_bit | length)
    elif length < 1 << 16:
        header.append(mask_bit | 126)
        header.extend(struct.pack(">H", length))
    else:
        header.append(mask_bit | 127)
        header.extend(struct.pack(">Q", length))
    if mask:
        key = b"\x00\x01\x02\x03"  # deterministic mask; security is out of scope
        header.extend(key)
        payload = bytes(b ^ key[i % 4] for i, b in enumerate(payload))
    return bytes(header) + payload


class WebSocketAssembler:
    """Reassembles masked text frames into newline-delimited messages."""

    def __init__(self) -> None:
        self._buffer = bytearray()
        self._lines = LineAssembler()
        self.closed = False

    def feed(self, data: bytes) -> list[Message]:
        self._buffer.extend(data)
        messages: list[Message] = []
        while True:
            frame = self._next_frame()
            if frame is None:
                break
            opcode, payload = frame
            if opcode == 0x8:  # close
                self.closed = True
                break
            if opcode in (0x1, 0x2, 0x0):
                text = payload if payload.endswith(b"\n") else payload + b"\n"
                messages.extend(self._lines.feed(text))
            # ping/pong frames are ignored; liveness uses protocol heartbeats
        return messages

    def _next_frame(self) -> tuple[int, bytes] | None:
        buf = self._buffer
        if len(buf) < 2:
            return None
        opcode = buf[0] & 0x0F
        masked = bool(buf[1] & 0x80)
        length = buf[1] & 0x7F
        offset = 2
        if length == 126:
            if len(buf) < 4:
                return None
            length = struct.unpack(">H", bytes(buf[2:4]))[0]
            offset = 4
        elif length == 127:
            if len(buf) < 10:
                return None
            length = struct.unpack(">Q", bytes(buf[2:10]))[0]
            offset = 10
        mask_key = b""
        if masked:
            if len(buf) < offset + 4:
                return None
            mask_key = bytes(buf[offset:offset + 4])
            offset += 4
        if len(buf) < offset + length:
            return None
        payload = bytes(buf[offset:offset + length])
        del buf[:offset + length]
        if masked:
            payload = bytes(b ^ mask_key[i % 4] for i, b in enumerate(payload))
        return (opcode, payload)
