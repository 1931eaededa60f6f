"""Wire-level HTTP request/response model and a small path router.

Services express their whole API as `Router` handlers operating on
serialized JSON bytes. The same router instance is served over a real
socket (net.httpserver) or called in memory (net.client.DirectClient),
so both transports exercise identical wire bytes.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable
from urllib.parse import parse_qsl, urlsplit

from planttwin.errors import TwinError


@dataclass
class Request:
    method: str
    path: str
    query: dict[str, str] = field(default_factory=dict)
    headers: dict[str, str] = field(default_factory=dict)  # lower-case keys
    body: bytes = b""

    def json(self) -> dict:
        try:
            parsed = json.loads(self.body.decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise BadRequest(f"body is not valid JSON: {exc}") from exc
        if not isinstance(parsed, dict):
            raise BadRequest("JSON body must be an object")
        return parsed

    def header(self, name: str, default: str = "") -> str:
        return self.headers.get(name.lower(), default)


@dataclass
class Response:
    status: int = 200
    headers: dict[str, str] = field(default_factory=dict)
    body: bytes = b""

    def json(self) -> dict:
        return json.loads(self.body.decode("utf-8"))


class BadRequest(TwinError):
    code = "BadRequest"
    http_status = 400


class NotFound(TwinError):
    code = "NotFound"
    http_status = 404


class MethodNotAllowed(TwinError):
    code = "MethodNotAllowed"
    http_status = 405


def json_response(payload: dict, status: int = 200, headers: dict | None = None) -> Response:
    body = json.dumps(payload, sort_keys=True).encode("utf-8")
    all_headers = {"content-type": "application/json"}
    if headers:
        all_headers.update(headers)
    return Response(status=status, headers=all_headers, body=body)


def error_response(err: TwinError) -> Response:
    return json_response(err.to_wire(), status=err.http_status)


Handler = Callable[..., Response]


class Router:
    """Method + path-template dispatch. Templates use {name} segments."""

    def __init__(self):
        self._routes: list[tuple[str, tuple[str, ...], Handler]] = []

    def add(self, method: str, template: str, handler: Handler) -> None:
        segments = tuple(template.strip("/").split("/"))
        self._routes.append((method.upper(), segments, handler))

    def dispatch(self, request: Request) -> Response:
        parts = tuple(p for p in request.path.strip("/").split("/") if p != "")
        path_matched = False
        for method, segments, handler in self._routes:
            params = _match(segments, parts)
            if params is None:
                continue
            path_matched = True
            if method != request.method.upper():
                continue
            try:
                return handler(request, **params)
            except TwinError as err:
                return error_response(err)
        if path_matched:
            return error_response(MethodNotAllowed(f"{request.method} not allowed on {request.path}"))
        return error_response(NotFound(f"no route for {request.path}"))


def _match(segments: tuple[str, ...], parts: tuple[str, ...]) -> dict | None:
    if len(segments) != len(parts):
        return None
    params = {}
    for seg, part in zip(segments, parts):
        if seg.startswith("{") and seg.endswith("}"):
            params[seg[1:-1]] = part
        elif seg != part:
            return None
    return params


def split_target(target: str) -> tuple[str, dict[str, str]]:
    """Split an HTTP request target into (path, query dict)."""
    parsed = urlsplit(target)
    return parsed.path, dict(parse_qsl(parsed.query))
