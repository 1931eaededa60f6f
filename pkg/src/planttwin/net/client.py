"""Wire clients: in-memory dispatch or a real socket, same bytes either way."""
from __future__ import annotations

import http.client
import json
import socket
from typing import Callable

from planttwin.net.http import Request, Response, Router


class TransportError(Exception):
    """Connection-level failure (refused, reset, timeout); retryable."""


class WireClient:
    def request(
        self,
        method: str,
        path: str,
        *,
        query: dict | None = None,
        json_body: dict | None = None,
        body: bytes | None = None,
        headers: dict | None = None,
    ) -> Response:
        raise NotImplementedError


class DirectClient(WireClient):
    """Calls a Router in process. JSON still round-trips through bytes so
    the wire schema is exercised; `before_request` lets tests count calls
    or inject transport faults."""

    def __init__(self, router: Router, before_request: Callable[[Request], None] | None = None):
        self.router = router
        self.before_request = before_request

    def request(self, method, path, *, query=None, json_body=None, body=None, headers=None):
        payload = body if body is not None else b""
        all_headers = {k.lower(): v for k, v in (headers or {}).items()}
        if json_body is not None:
            payload = json.dumps(json_body, sort_keys=True).encode("utf-8")
            all_headers.setdefault("content-type", "application/json")
        request = Request(
            method=method,
            path=path,
            query={k: str(v) for k, v in (query or {}).items()},
            headers=all_headers,
            body=payload,
        )
        if self.before_request is not None:
            self.before_request(request)
        return self.router.dispatch(request)


class SocketClient(WireClient):
    def __init__(self, host: str, port: int, timeout: float = 10.0):
        self.host = host
        self.port = port
        self.timeout = timeout

    def request(self, method, path, *, query=None, json_body=None, body=None, headers=None):
        payload = body if body is not None else b""
        all_headers = dict(headers or {})
        if json_body is not None:
            payload = json.dumps(json_body, sort_keys=True).encode("utf-8")
            all_headers.setdefault("content-type", "application/json")
        target = path
        if query:
            pairs = "&".join(f"{k}={v}" for k, v in query.items())
            target = f"{path}?{pairs}"
        conn = http.client.HTTPConnection(self.host, self.port, timeout=self.timeout)
        try:
            conn.request(method, target, body=payload or None, headers=all_headers)
            raw = conn.getresponse()
            data = raw.read()
            return Response(
                status=raw.status,
                headers={k.lower(): v for k, v in raw.getheaders()},
                body=data,
            )
        except (ConnectionError, socket.timeout, socket.gaierror, http.client.HTTPException, OSError) as exc:
            raise TransportError(f"{method} {target} on {self.host}:{self.port}: {exc}") from exc
        finally:
            conn.close()
