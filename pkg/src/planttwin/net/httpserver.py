"""Serve a Router over a real socket, including WebSocket upgrades."""
from __future__ import annotations

import errno
import json
import socket
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from typing import Callable

from planttwin.errors import PortInUse
from planttwin.net import websocket
from planttwin.net.http import Request, Response, Router, split_target

# A websocket endpoint handler runs for the lifetime of one connection.
WsHandler = Callable[[websocket.WebSocketConnection, Request], None]


class ApiServer:
    """ThreadingHTTPServer wrapper dispatching into a Router.

    GET requests carrying a WebSocket upgrade on a registered channel path
    are handed to the channel handler and block their connection thread.
    """

    def __init__(self, router: Router, ws_routes: dict[str, WsHandler] | None = None):
        self.router = router
        self.ws_routes = ws_routes or {}
        self._server: ThreadingHTTPServer | None = None
        self._thread: threading.Thread | None = None

    def start(self, host: str = "127.0.0.1", port: int = 0) -> tuple[str, int]:
        outer = self

        class Handler(BaseHTTPRequestHandler):
            protocol_version = "HTTP/1.1"

            def log_message(self, fmt, *args):  # quiet by default
                pass

            def _request(self) -> Request:
                path, query = split_target(self.path)
                headers = {k.lower(): v for k, v in self.headers.items()}
                length = int(headers.get("content-length", "0") or "0")
                body = self.rfile.read(length) if length else b""
                return Request(
                    method=self.command,
                    path=path,
                    query=query,
                    headers=headers,
                    body=body,
                )

            def _respond(self, response: Response) -> None:
                self.send_response(response.status)
                body = response.body
                for name, value in response.headers.items():
                    self.send_header(name, value)
                self.send_header("content-length", str(len(body)))
                self.end_headers()
                if body:
                    self.wfile.write(body)

            def _maybe_upgrade(self, request: Request) -> bool:
                handler = outer.ws_routes.get(request.path)
                if handler is None or not websocket.is_upgrade_request(request.headers):
                    return False
                key = request.headers["sec-websocket-key"]
                self.send_response(101, "Switching Protocols")
                self.send_header("Upgrade", "websocket")
                self.send_header("Connection", "Upgrade")
                self.send_header("Sec-WebSocket-Accept", websocket.accept_key(key))
                self.end_headers()
                self.wfile.flush()
                conn = websocket.WebSocketConnection(self.connection, mask_outgoing=False)
                try:
                    handler(conn, request)
                finally:
                    conn.close()
                    self.close_connection = True
                return True

            def _handle(self) -> None:
                try:
                    request = self._request()
                    if request.method == "GET" and self._maybe_upgrade(request):
                        return
                    self._respond(outer.router.dispatch(request))
                except (ConnectionError, BrokenPipeError):
                    self.close_connection = True

            do_GET = do_POST = do_PUT = do_DELETE = _handle

        try:
            self._server = ThreadingHTTPServer((host, port), Handler)
        except OSError as exc:
            if exc.errno in (errno.EADDRINUSE, errno.EACCES):
                raise PortInUse(f"cannot bind {host}:{port}: {exc}") from exc
            raise
        self._server.daemon_threads = True
        self._thread = threading.Thread(target=self._server.serve_forever, daemon=True)
        self._thread.start()
        return self._server.server_address[0], self._server.server_address[1]

    @property
    def address(self) -> tuple[str, int]:
        assert self._server is not None, "server not started"
        return self._server.server_address[:2]

    def stop(self) -> None:
        if self._server is not None:
            self._server.shutdown()
            self._server.server_close()
            self._server = None
        if self._thread is not None:
            self._thread.join(timeout=5)
            self._thread = None
