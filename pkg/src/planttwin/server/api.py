"""HTTP + channel surface of the interface server.

  GET  /v1/health
  GET  /v1/objects
  GET  /v1/objects/{id}/details
  GET  /v1/objects/{id}/actions
  GET  /v1/view            raw raster, or JSON envelope with overlays
  POST /v1/frames          (scene pipeline, mounted here)
  GET  /v1/panorama        (scene pipeline, mounted here)
  WS   /v1/channel         commands up, acks/snapshots down

The channel message schema lives in docs/protocol.md.
"""
from __future__ import annotations

import base64
import json
import threading

from planttwin.net import websocket
from planttwin.net.http import BadRequest, Request, Response, Router, json_response
from planttwin.scene.api import add_scene_routes, image_response, view_pose_from_query
from planttwin.scene.compose import extract_view
from planttwin.scene.image import encode_png
from planttwin.server.overlay import object_overlay
from planttwin.server.service import InterfaceService, _pose_wire

ACTIVE_OUTLINE_COLOR = (80, 160, 255)


def overlay_color(service: InterfaceService, object_id: str) -> list[int] | None:
    """Outline tint: issue -> severity color, active -> accent, normal -> none."""
    state = service._highlight[object_id]
    if state.mode == "issue" and state.severity is not None:
        return list(service.severity_colors[state.severity])
    if state.mode == "active":
        return list(ACTIVE_OUTLINE_COLOR)
    return None


def build_router(service: InterfaceService) -> Router:
    router = Router()
    add_scene_routes(router, service.store, include_view=False)

    def health(request: Request) -> Response:
        return json_response(
            {
                "status": "ok",
                "service": "interface",
                "sim_time": service.sim_time(),
                "sessions": len(service._sessions),
                "panorama_version": service.store.version,
            }
        )

    def objects(request: Request) -> Response:
        return json_response({"objects": service.object_summaries()})

    def object_details(request: Request, object_id: str) -> Response:
        return json_response(service.object_details(object_id))

    def object_actions(request: Request, object_id: str) -> Response:
        return json_response({"actions": service.object_actions(object_id)})

    def view(request: Request) -> Response:
        if "session" in request.query:
            session = service.session(request.query["session"])
            pose = session.pose
        else:
            pose = view_pose_from_query(request.query)
        pano = service.store.panorama()
        raster = extract_view(pano, pose)
        accept = request.header("accept", "application/json")
        if "application/json" not in accept:
            return image_response(
                raster, accept, {"x-panorama-version": str(pano.version)}
            )
        overlays = []
        for obj in service.objects.values():
            entry = object_overlay(service.camera_pos, pose, obj)
            entry["highlight"] = service._highlight[obj.id].to_wire()
            entry["color"] = overlay_color(service, obj.id)
            overlays.append(entry)
        return json_response(
            {
                "pose": _pose_wire(pose),
                "panorama_version": pano.version,
                "width": raster.shape[1],
                "height": raster.shape[0],
                "image_png_b64": base64.b64encode(encode_png(raster)).decode("ascii"),
                "objects": overlays,
            }
        )

    router.add("GET", "/v1/health", health)
    router.add("GET", "/v1/objects", objects)
    router.add("GET", "/v1/objects/{object_id}/details", object_details)
    router.add("GET", "/v1/objects/{object_id}/actions", object_actions)
    router.add("GET", "/v1/view", view)
    return router


def channel_handler(service: InterfaceService):
    """WebSocket glue: one session per connection, writer thread pushes
    queued messages, reader loop routes commands."""

    def handle(conn: websocket.WebSocketConnection, request: Request) -> None:
        session = service.create_session()
        channel = session.channel
        stop = threading.Event()

        def writer():
            while not stop.is_set():
                message = channel.pop(timeout=0.25)
                if message is None:
                    if channel.closed:
                        break
                    continue
                try:
                    conn.send_text(json.dumps(message, sort_keys=True))
                except websocket.ConnectionClosed:
                    break

        pump = threading.Thread(target=writer, daemon=True)
        pump.start()
        try:
            while True:
                text = conn.recv_text()
                if text is None:
                    break
                handle_channel_text(service, session.id, text)
        finally:
            stop.set()
            service.close_session(session.id)
            pump.join(timeout=2)

    return handle


def handle_channel_text(service: InterfaceService, session_id: str, text: str) -> dict:
    """Parse and route one raw channel message; malformed input yields a
    typed error message instead of breaking the session."""
    session = service.session(session_id)
    try:
        message = json.loads(text)
    except json.JSONDecodeError as exc:
        return session.channel.send(
            "error", {"code": "BadRequest", "message": f"not JSON: {exc}"}
        )
    if not isinstance(message, dict) or message.get("type") != "command":
        return session.channel.send(
            "error",
            {"code": "BadRequest", "message": "expected {type: 'command', seq, body}"},
        )
    body = message.get("body")
    if not isinstance(body, dict):
        return session.channel.send(
            "error", {"code": "BadRequest", "message": "command body must be an object"}
        )
    seq = message.get("seq")
    seq = seq if isinstance(seq, int) else 0
    return service.route_command(session_id, body, command_seq=seq)
