"""Minimal threaded WebSocket (RFC 6455) server and client, text frames only.

Enough protocol for a browser or a scripted test client: HTTP upgrade
handshake, masked client->server frames, close/ping/pong control frames, 16-
and 64-bit payload lengths.  No extensions, no fragmentation support beyond
FIN=1 frames.
"""

from __future__ import annotations

import base64
import hashlib
import os
import socket
import struct
import threading

_WS_GUID = "258EAFA5-E914-47DA-95CA-C5AB0DC85B11"

OP_TEXT = 0x1
OP_CLOSE = 0x8
OP_PING = 0x9
OP_PONG = 0xA


def _accept_key(key: str) -> str:
    return base64.b64encode(hashlib.sha1((key + _WS_GUID).encode()).digest()).decode()


def _recv_exact(sock: socket.socket, n: int) -> bytes:
    buf = b""
    while len(buf) < n:
        chunk = sock.recv(n - len(buf))
        if not chunk:
            raise ConnectionError("socket closed")
        buf += chunk
    return buf


def read_frame(sock: socket.socket) -> tuple[int, bytes]:
    """Returns (opcode, payload) for the next frame."""
    head = _recv_exact(sock, 2)
    opcode = head[0] & 0x0F
    masked = bool(head[1] & 0x80)
    length = head[1] & 0x7F
    if length == 126:
        length = struct.unpack(">H", _recv_exact(sock, 2))[0]
    elif length == 127:
        length = struct.unpack(">Q", _recv_exact(sock, 8))[0]
    mask = _recv_exact(sock, 4) if masked else None
    payload = _recv_exact(sock, length) if length else b""
    if mask:
        payload = bytes(b ^ mask[i % 4] for i, b in enumerate(payload))
    return opcode, payload


def write_frame(sock: socket.socket, payload: bytes, opcode: int = OP_TEXT, mask: bool = False) -> None:
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
        payload = bytes(b ^ key[i % 4] for i, b in enumerate(payload))
        head += key
    sock.sendall(head + payload)


class WsClientHandle:
    """Server-side view of one connected client."""

    _ids = 0

    def __init__(self, sock: socket.socket, addr):
        WsClientHandle._ids += 1
        self.id = WsClientHandle._ids
        self.sock = sock
        self.addr = addr
        self.send_lock = threading.Lock()
        self.alive = True

    def send_text(self, text: str) -> bool:
        try:
            with self.send_lock:
                write_frame(self.sock, text.encode("utf-8"), OP_TEXT)
            return True
        except OSError:
            self.alive = False
            return False

    def close(self, reason: str = "") -> None:
        self.alive = False
        try:
            with self.send_lock:
                write_frame(self.sock, reason.encode("utf-8"), OP_CLOSE)
        except OSError:
            pass
        try:
            self.sock.close()
        except OSError:
            pass


class WsServer:
    """Accepts WebSocket clients; decoded text messages go to on_message(client,
    text), connect/disconnect to the respective callbacks.  Each client gets a
    reader thread; sends are serialized per client and never block the caller
    beyond the OS send buffer."""

    def __init__(self, host: str, port: int, on_message, on_connect=None, on_disconnect=None):
        self.on_message = on_message
        self.on_connect = on_connect
        self.on_disconnect = on_disconnect
        self._listener = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
        self._listener.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        self._listener.bind((host, port))
        self._listener.listen(8)
        self.port = self._listener.getsockname()[1]
        self.clients: dict[int, WsClientHandle] = {}
        self._lock = threading.Lock()
        self._stop = threading.Event()
        self._accept_thread = threading.Thread(target=self._accept_loop, daemon=True)

    def start(self) -> None:
        self._accept_thread.start()

    def stop(self) -> None:
        self._stop.set()
        try:
            self._listener.close()
        except OSError:
            pass
        with self._lock:
            clients = list(self.clients.values())
        for c in clients:
            c.close("server shutdown")

    def broadcast(self, text: str) -> None:
        with self._lock:
            clients = list(self.clients.values())
        for c in clients:
            if not c.send_text(text):
                self._drop(c, "send failed")

    def _drop(self, client: WsClientHandle, reason: str) -> None:
        with self._lock:
            self.clients.pop(client.id, None)
        client.close(reason)
        if self.on_disconnect:
            self.on_disconnect(client, reason)

    def _accept_loop(self) -> None:
        while not self._stop.is_set():
            try:
                sock, addr = self._listener.accept()
            except OSError:
                return
            threading.Thread(target=self._client_session, args=(sock, addr), daemon=True).start()

    def _client_session(self, sock: socket.socket, addr) -> None:
        try:
            if not self._handshake(sock):
                sock.close()
                return
        except OSError:
            return
        client = WsClientHandle(sock, addr)
        with self._lock:
            self.clients[client.id] = client
        if self.on_connect:
            self.on_connect(client)
        try:
            while not self._stop.is_set() and client.alive:
                opcode, payload = read_frame(sock)
                if opcode == OP_CLOSE:
                    self._drop(client, "client closed")
                    return
                if opcode == OP_PING:
                    with client.send_lock:
                        write_frame(sock, payload, OP_PONG)
                    continue
                if opcode == OP_TEXT:
                    try:
                        self.on_message(client, payload.decode("utf-8"))
                    except ValueError as e:
                        import json as _json

                        client.send_text(
                            _json.dumps(
                                {"v": 1, "type": "session_event", "event": "protocol_error", "reason": str(e)[:200]}
                            )
                        )
                        self._drop(client, f"protocol violation: {e}")
                        return
        except (ConnectionError, OSError):
            self._drop(client, "connection lost")

    @staticmethod
    def _handshake(sock: socket.socket) -> bool:
        data = b""
        while b"\r\n\r\n" not in data:
            chunk = sock.recv(4096)
            if not chunk:
                return False
            data += chunk
            if len(data) > 65536:
                return False
        headers = {}
        for line in data.split(b"\r\n")[1:]:
            if b":" in line:
                k, v = line.split(b":", 1)
                headers[k.strip().lower().decode()] = v.strip().decode()
        key = headers.get("sec-websocket-key")
        if not key:
            return False
        resp = (
            "HTTP/1.1 101 Switching Protocols\r\n"
            "Upgrade: websocket\r\n"
            "Connection: Upgrade\r\n"
            f"Sec-WebSocket-Accept: {_accept_key(key)}\r\n\r\n"
        )
        sock.sendall(resp.encode())
        return True


class WsClient:
    """Blocking WebSocket client for scripted sessions and tests."""

    def __init__(self, host: str, port: int, timeout: float = 5.0):
        self.sock = socket.create_connection((host, port), timeout=timeout)
        key = base64.b64encode(os.urandom(16)).decode()
        req = (
            f"GET / HTTP/1.1\r\nHost: {host}:{port}\r\n"
            "Upgrade: websocket\r\nConnection: Upgrade\r\n"
            f"Sec-WebSocket-Key: {key}\r\nSec-WebSocket-Version: 13\r\n\r\n"
        )
        self.sock.sendall(req.encode())
        data = b""
        while b"\r\n\r\n" not in data:
            chunk = self.sock.recv(4096)
            if not chunk:
                raise ConnectionError("handshake failed")
            data += chunk
        if b" 101 " not in data.split(b"\r\n", 1)[0]:
            raise ConnectionError(f"handshake rejected: {data[:100]!r}")

    def send_text(self, text: str) -> None:
        write_frame(self.sock, text.encode("utf-8"), OP_TEXT, mask=True)

    def recv_text(self, timeout: float | None = None) -> str | None:
        """Next text frame, or None on close."""
        if timeout is not None:
            self.sock.settimeout(timeout)
        while True:
            opcode, payload = read_frame(self.sock)
            if opcode == OP_CLOSE:
                return None
            if opcode == OP_TEXT:
                return payload.decode("utf-8")
            if opcode == OP_PING:
                write_frame(self.sock, payload, OP_PONG, mask=True)

    def close(self) -> None:
        try:
            write_frame(self.sock, b"", OP_CLOSE, mask=True)
            self.sock.close()
        except OSError:
            pass
