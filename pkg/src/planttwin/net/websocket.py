"""Minimal RFC 6455 WebSocket framing: enough for JSON text messages.

Supports the server handshake, text/binary/ping/pong/close frames,
fragmented messages, and a blocking client. No extensions, no
permessage-deflate.
"""
from __future__ import annotations

import base64
import hashlib
import os
import socket
import struct

_GUID = "258EAFA5-E914-47DA-95CA-C5AB0DC85B11"

OP_CONT = 0x0
OP_TEXT = 0x1
OP_BINARY = 0x2
OP_CLOSE = 0x8
OP_PING = 0x9
OP_PONG = 0xA


class ConnectionClosed(Exception):
    pass


def accept_key(client_key: str) -> str:
    digest = hashlib.sha1((client_key + _GUID).encode("ascii")).digest()
    return base64.b64encode(digest).decode("ascii")


def is_upgrade_request(headers: dict[str, str]) -> bool:
    return (
        headers.get("upgrade", "").lower() == "websocket"
        and "upgrade" in headers.get("connection", "").lower()
        and "sec-websocket-key" in headers
    )


def encode_frame(opcode: int, payload: bytes, mask: bool = False) -> bytes:
    head = bytes([0x80 | opcode])
    length = len(payload)
    mask_bit = 0x80 if mask else 0
    if length < 126:
        head += bytes([mask_bit | length])
    elif length < 1 << 16:
        head += bytes([mask_bit | 126]) + struct.pack(">H", length)
    else:
        head += bytes([mask_bit | 127]) + struct.pack(">Q", length)
    if mask:
        key = os.urandom(4)
        masked = bytes(b ^ key[i % 4] for i, b in enumerate(payload))
        return head + key + masked
    return head + payload


class WebSocketConnection:
    """Blocking message-oriented wrapper over a connected socket."""

    def __init__(self, sock: socket.socket, mask_outgoing: bool):
        self._sock = sock
        self._reader = sock.makefile("rb")
        self._mask = mask_outgoing
        self._closed = False

    def send_text(self, text: str) -> None:
        self._send_frame(OP_TEXT, text.encode("utf-8"))

    def recv_text(self) -> str | None:
        """Next text message, or None once the connection is closed."""
        while True:
            frame = self._recv_frame()
            if frame is None:
                return None
            opcode, payload = frame
            if opcode == OP_PING:
                self._send_frame(OP_PONG, payload)
            elif opcode == OP_CLOSE:
                self._acknowledge_close(payload)
                return None
            elif opcode in (OP_TEXT, OP_BINARY):
                return payload.decode("utf-8")
            # ignore pongs and anything unsolicited

    def close(self, code: int = 1000) -> None:
        if not self._closed:
            try:
                self._send_frame(OP_CLOSE, struct.pack(">H", code))
            except OSError:
                pass
        self._shutdown()

    def _acknowledge_close(self, payload: bytes) -> None:
        if not self._closed:
            try:
                self._send_frame(OP_CLOSE, payload[:2])
            except OSError:
                pass
        self._shutdown()

    def _shutdown(self) -> None:
        self._closed = True
        try:
            self._sock.close()
        except OSError:
            pass

    def _send_frame(self, opcode: int, payload: bytes) -> None:
        if self._closed:
            raise ConnectionClosed("send on closed connection")
        try:
            self._sock.sendall(encode_frame(opcode, payload, mask=self._mask))
        except OSError as exc:
            self._closed = True
            raise ConnectionClosed(str(exc)) from exc

    def _recv_frame(self) -> tuple[int, bytes] | None:
        # assemble fragmented messages transparently
        message = b""
        message_opcode = None
        while True:
            head = self._read_exact(2)
            if head is None:
                return None
            fin = bool(head[0] & 0x80)
            opcode = head[0] & 0x0F
            masked = bool(head[1] & 0x80)
            length = head[1] & 0x7F
            if length == 126:
                ext = self._read_exact(2)
                if ext is None:
                    return None
                length = struct.unpack(">H", ext)[0]
            elif length == 127:
                ext = self._read_exact(8)
                if ext is None:
                    return None
                length = struct.unpack(">Q", ext)[0]
            key = b""
            if masked:
                key = self._read_exact(4) or b""
                if len(key) != 4:
                    return None
            payload = self._read_exact(length) if length else b""
            if payload is None:
                return None
            if masked:
                payload = bytes(b ^ key[i % 4] for i, b in enumerate(payload))
            if opcode in (OP_CLOSE, OP_PING, OP_PONG):
                if message_opcode is None or opcode == OP_CLOSE:
                    return opcode, payload
                if opcode == OP_PING:  # control frame between fragments
                    self._send_frame(OP_PONG, payload)
                continue
            if message_opcode is None:
                message_opcode = opcode
            message += payload
            if fin:
                return message_opcode, message

    def _read_exact(self, n: int) -> bytes | None:
        try:
            data = self._reader.read(n)
        except (OSError, ValueError):
            return None
        if data is None or len(data) != n:
            return None
        return data


def client_handshake(sock: socket.socket, host: str, path: str) -> WebSocketConnection:
    key = base64.b64encode(os.urandom(16)).decode("ascii")
    request = (
        f"GET {path} HTTP/1.1\r\n"
        f"Host: {host}\r\n"
        "Upgrade: websocket\r\n"
        "Connection: Upgrade\r\n"
        f"Sec-WebSocket-Key: {key}\r\n"
        "Sec-WebSocket-Version: 13\r\n\r\n"
    )
    sock.sendall(request.encode("ascii"))
    reader = sock.makefile("rb")
    status_line = reader.readline().decode("ascii", "replace")
    if " 101 " not in status_line:
        raise ConnectionClosed(f"handshake rejected: {status_line.strip()}")
    headers = {}
    while True:
        line = reader.readline().decode("ascii", "replace").strip()
        if not line:
            break
        name, _, value = line.partition(":")
        headers[name.strip().lower()] = value.strip()
    if headers.get("sec-websocket-accept") != accept_key(key):
        raise ConnectionClosed("handshake accept key mismatch")
    return WebSocketConnection(sock, mask_outgoing=True)


def connect(host: str, port: int, path: str, timeout: float = 10.0) -> WebSocketConnection:
    sock = socket.create_connection((host, port), timeout=timeout)
    sock.settimeout(timeout)
    return client_handshake(sock, f"{host}:{port}", path)
