"""HTTP+JSON surface of the IoT server.

  GET  /v1/health
  GET  /v1/devices
  GET  /v1/readings?kind=
  POST /v1/actuators/{id}/command
  POST /v1/interpolate
"""
from __future__ import annotations

from planttwin.iot.registry import ActuatorDirective
from planttwin.iot.service import IotService
from planttwin.net.http import BadRequest, Request, Response, Router, json_response


def build_router(service: IotService) -> Router:
    router = Router()

    def health(request: Request) -> Response:
        return json_response(
            {"status": "ok", "service": "iot", "sim_time": service.sim_time()}
        )

    def devices(request: Request) -> Response:
        return json_response(service.list_devices())

    def readings(request: Request) -> Response:
        kind = request.query.get("kind")
        return json_response(
            {"readings": [r.to_wire() for r in service.latest_readings(kind)]}
        )

    def command(request: Request, actuator_id: str) -> Response:
        directive = ActuatorDirective.from_wire(actuator_id, request.json())
        return json_response(service.command_actuator(directive))

    def interpolate(request: Request) -> Response:
        body = request.json()
        position = body.get("position")
        kind = body.get("kind")
        if (
            not isinstance(position, (list, tuple))
            or len(position) != 3
            or not all(isinstance(c, (int, float)) for c in position)
        ):
            raise BadRequest("position must be [x, y, z] numbers")
        if not isinstance(kind, str):
            raise BadRequest("kind must be a string")
        result = service.interpolate(tuple(float(c) for c in position), kind)
        return json_response(result)

    router.add("GET", "/v1/health", health)
    router.add("GET", "/v1/devices", devices)
    router.add("GET", "/v1/readings", readings)
    router.add("POST", "/v1/actuators/{actuator_id}/command", command)
    router.add("POST", "/v1/interpolate", interpolate)
    return router
