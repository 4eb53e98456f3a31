"""Wire protocol: typed envelopes and length-prefixed socket framing.

Every message is one JSON object::

    {"kind": ..., "session": ..., "tick": ..., "payload": {...}}

carried over TCP as a 4-byte big-endian length prefix followed by the
UTF-8 JSON bytes, or over the HTTP bridge as plain JSON arrays.  An
``act`` always names the tick it answers; the session worker rejects
stale ones.

Message kinds and their payloads:

    hello            {client, session?, side?}    client intro / session join
    create_session   {scenario, seed, red, blue, side?, realtime_ms?, record?}
    session_created  {session descriptor fields..., your_side?}
    observation      {side, agents: {uid: {vector, mask}}, render_state}
    act              {side, actions: {uid: action-string}}
    act_ack          {accepted: [uid...]}
    step_result      {reward_red, reward_blue, events, render_state}
    episode_end      {winner, ticks, final_bloods, render_state}
    replay_chunk     {name, seq, data, last}
    error            {message}
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass, field

from .errors import ProtocolError

KINDS = (
    "hello",
    "create_session",
    "session_created",
    "observation",
    "act",
    "act_ack",
    "step_result",
    "episode_end",
    "replay_chunk",
    "error",
)

MAX_FRAME = 16 * 1024 * 1024


@dataclass
class ProtocolMessage:
    kind: str
    session: str | None = None
    tick: int | None = None
    payload: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "session": self.session,
            "tick": self.tick,
            "payload": self.payload,
        }

    @staticmethod
    def from_dict(doc: dict) -> "ProtocolMessage":
        if not isinstance(doc, dict):
            raise ProtocolError(f"message must be an object, got {type(doc).__name__}")
        kind = doc.get("kind")
        if kind not in KINDS:
            raise ProtocolError(f"unknown message kind {kind!r}")
        payload = doc.get("payload") or {}
        if not isinstance(payload, dict):
            raise ProtocolError("payload must be an object")
        return ProtocolMessage(
            kind=kind,
            session=doc.get("session"),
            tick=doc.get("tick"),
            payload=payload,
        )


def encode(msg: ProtocolMessage) -> bytes:
    data = json.dumps(msg.to_dict(), sort_keys=True).encode("utf-8")
    if len(data) > MAX_FRAME:
        raise ProtocolError(f"message of {len(data)} bytes exceeds frame limit")
    return struct.pack("!I", len(data)) + data


def send_message(sock, msg: ProtocolMessage) -> None:
    sock.sendall(encode(msg))


def recv_message(sock) -> ProtocolMessage | None:
    """Read one framed message; None on a cleanly closed connection."""
    header = _recv_exact(sock, 4)
    if header is None:
        return None
    (length,) = struct.unpack("!I", header)
    if length > MAX_FRAME:
        raise ProtocolError(f"frame of {length} bytes exceeds limit")
    data = _recv_exact(sock, length)
    if data is None:
        return None
    try:
        return ProtocolMessage.from_dict(json.loads(data.decode("utf-8")))
    except json.JSONDecodeError as exc:
        raise ProtocolError(f"malformed frame: {exc}") from None


def _recv_exact(sock, n: int) -> bytes | None:
    buf = b""
    while len(buf) < n:
        chunk = sock.recv(n - len(buf))
        if not chunk:
            return None
        buf += chunk
    return buf
