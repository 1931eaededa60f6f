"""Interface server's client onto the IoT server wire contract.

Retry discipline: any HTTP response is final (4xx/5xx map to IotRejected,
no retry); a transport failure earns exactly one retry before surfacing
IotUnreachable. Requests carry an x-origin header ("command" for routed
user commands, "twin" for snapshot/details evaluation) so an instrumented
IoT server can verify stream separation externally.
"""
from __future__ import annotations

import json
from dataclasses import dataclass

from planttwin.errors import IotRejected, IotUnreachable
from planttwin.net.client import TransportError, WireClient
from planttwin.net.http import Response


@dataclass
class IotCall:
    payload: dict
    attempts: int


class IotApiClient:
    def __init__(self, wire: WireClient):
        self.wire = wire

    def _call(self, method: str, path: str, *, query=None, json_body=None, origin="command") -> IotCall:
        headers = {"x-origin": origin}
        attempts = 0
        last_error: TransportError | None = None
        response: Response | None = None
        while attempts < 2 and response is None:
            attempts += 1
            try:
                response = self.wire.request(
                    method, path, query=query, json_body=json_body, headers=headers
                )
            except TransportError as exc:
                last_error = exc
        if response is None:
            err = IotUnreachable(str(last_error))
            err.attempts = attempts
            raise err
        payload = _decode(response)
        if response.status >= 400:
            error = payload.get("error", {})
            err = IotRejected(
                error.get("code", f"http-{response.status}"),
                error.get("message", ""),
            )
            err.attempts = attempts
            raise err
        return IotCall(payload=payload, attempts=attempts)

    def command_actuator(self, actuator_id: str, directive_body: dict, origin="command") -> IotCall:
        return self._call(
            "POST",
            f"/v1/actuators/{actuator_id}/command",
            json_body=directive_body,
            origin=origin,
        )

    def readings(self, kind: str | None = None, origin="command") -> IotCall:
        query = {"kind": kind} if kind else None
        return self._call("GET", "/v1/readings", query=query, origin=origin)

    def interpolate(self, position, kind: str, origin="command") -> IotCall:
        return self._call(
            "POST",
            "/v1/interpolate",
            json_body={"position": list(position), "kind": kind},
            origin=origin,
        )

    def list_devices(self, origin="twin") -> IotCall:
        return self._call("GET", "/v1/devices", origin=origin)

    def health(self) -> IotCall:
        return self._call("GET", "/v1/health", origin="twin")


def _decode(response: Response) -> dict:
    try:
        payload = json.loads(response.body.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError):
        payload = {}
    return payload if isinstance(payload, dict) else {}
