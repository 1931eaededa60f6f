"""Interface server core.

Aggregates IoT data, routes the three command streams, owns per-session
view state and global object highlight state, evaluates issue severity,
and pushes twin snapshots to every connected console.

Stream separation is structural: only the iot-stream branch of
route_command ever touches the IoT client with origin="command"; twin
bookkeeping (snapshots, details) reads with origin="twin".
"""
from __future__ import annotations

import threading
from dataclasses import dataclass

from planttwin.errors import (
    ClientLocalCommand,
    IotRejected,
    IotUnreachable,
    TwinError,
    UnknownObject,
    UnknownSession,
)
from planttwin.geometry import Vec3
from planttwin.interact.highlight import NORMAL, HighlightState, transition
from planttwin.interact.objects import InteractableObject
from planttwin.interact.picking import pick, ray_from_view
from planttwin.interact.severity import DEFAULT_SEVERITY_COLORS, compute_severity
from planttwin.net.http import BadRequest
from planttwin.scene.compose import ViewPose
from planttwin.scene.store import FrameStore
from planttwin.server.audit import AuditLog
from planttwin.server.channel import DEFAULT_QUEUE_DEPTH, SessionChannel
from planttwin.server.iot_client import IotApiClient

PITCH_RANGE = (-90.0, 90.0)
VFOV_RANGE = (10.0, 120.0)

DEFAULT_POSE = ViewPose(yaw=0.0, pitch=0.0, vfov=60.0, viewport=(960, 540))

PROTOCOL_VERSION = 1


@dataclass
class Session:
    id: str
    pose: ViewPose
    channel: SessionChannel
    selection: str | None = None
    open_popup: tuple[str, str] | None = None  # (object id, "actions"|"details")


def clamp_pose(yaw: float, pitch: float, vfov: float, viewport: tuple[int, int]) -> ViewPose:
    pitch = min(PITCH_RANGE[1], max(PITCH_RANGE[0], pitch))
    vfov = min(VFOV_RANGE[1], max(VFOV_RANGE[0], vfov))
    return ViewPose(yaw=yaw, pitch=pitch, vfov=vfov, viewport=viewport)


class InterfaceService:
    def __init__(
        self,
        iot: IotApiClient,
        store: FrameStore,
        objects: list[InteractableObject],
        camera_pos: Vec3,
        audit: AuditLog | None = None,
        cadence: float = 1.0,
        queue_depth: int = DEFAULT_QUEUE_DEPTH,
        severity_colors: dict | None = None,
    ):
        ids = [o.id for o in objects]
        if len(set(ids)) != len(ids):
            raise ValueError("object ids must be unique")
        self.iot = iot
        self.store = store
        self.objects = {o.id: o for o in sorted(objects, key=lambda o: o.id)}
        self.camera_pos = camera_pos
        self.audit = audit if audit is not None else AuditLog()
        self.cadence = cadence
        self.queue_depth = queue_depth
        self.severity_colors = severity_colors or DEFAULT_SEVERITY_COLORS
        self._highlight: dict[str, HighlightState] = {oid: NORMAL for oid in self.objects}
        self._sessions: dict[str, Session] = {}
        self._session_counter = 0
        self._sim_time = 0.0
        self._last_snapshot_at: float | None = None
        self._lock = threading.RLock()

    # ------------------------------------------------------------- sessions

    def create_session(self) -> Session:
        with self._lock:
            self._session_counter += 1
            session = Session(
                id=f"session-{self._session_counter}",
                pose=DEFAULT_POSE,
                channel=SessionChannel(self.queue_depth),
            )
            self._sessions[session.id] = session
        session.channel.send(
            "hello",
            {
                "session_id": session.id,
                "protocol": PROTOCOL_VERSION,
                "cadence_s": self.cadence,
                "severity_colors": {k: list(v) for k, v in self.severity_colors.items()},
            },
        )
        return session

    def close_session(self, session_id: str) -> None:
        with self._lock:
            session = self._sessions.pop(session_id, None)
        if session is not None:
            session.channel.close()

    def session(self, session_id: str) -> Session:
        with self._lock:
            try:
                return self._sessions[session_id]
            except KeyError:
                raise UnknownSession(f"no session {session_id!r}") from None

    def sim_time(self) -> float:
        with self._lock:
            return self._sim_time

    # ------------------------------------------------------- command routing

    def route_command(self, session_id: str, body: dict, command_seq: int = 0) -> dict:
        """Route one command; returns the ack message after queuing it."""
        session = self.session(session_id)
        stream = body.get("stream")
        action = body.get("action", "")
        audit_entry = {
            "event": "command",
            "at": self.sim_time(),
            "session": session_id,
            "seq": command_seq,
            "stream": stream,
            "action": action,
        }
        try:
            try:
                if stream == "iot":
                    result, attempts = self._route_iot(body)
                    audit_entry["attempts"] = attempts
                    origin = "iot"
                elif stream == "interface":
                    result = self._route_interface(session, body)
                    origin = "interface"
                elif stream == "device":
                    raise ClientLocalCommand(
                        f"device-stream command {action!r} is client-local and never routed"
                    )
                else:
                    raise BadRequest(f"unknown command stream {stream!r}")
            except (TypeError, ValueError, KeyError) as exc:
                # malformed payloads become typed errors, never broken sessions
                raise BadRequest(f"malformed command: {exc}") from exc
        except TwinError as err:
            audit_entry["outcome"] = "error"
            audit_entry["code"] = err.code
            if isinstance(err, (IotRejected, IotUnreachable)):
                audit_entry["attempts"] = getattr(err, "attempts", 1)
            self.audit.record(audit_entry)
            ack_body = {
                "command_seq": command_seq,
                "status": "error",
                "origin": stream if stream in ("iot", "interface") else None,
                "error": err.to_wire()["error"],
            }
            session.channel.send("ack", ack_body)
            return {"type": "ack", "body": ack_body}
        audit_entry["outcome"] = "ok"
        audit_entry["result"] = result
        self.audit.record(audit_entry)
        ack_body = {
            "command_seq": command_seq,
            "status": "ok",
            "origin": origin,
            "result": result,
        }
        session.channel.send("ack", ack_body)
        return {"type": "ack", "body": ack_body}

    def _route_iot(self, body: dict) -> tuple[dict, int]:
        """Exactly one forwarded IoT API call per iot-stream command."""
        action = body.get("action")
        if action == "actuator":
            directive = body.get("directive")
            if not isinstance(directive, dict) or "actuator_id" not in directive:
                raise BadRequest("actuator command needs directive.actuator_id")
            wire_body = {k: v for k, v in directive.items() if k != "actuator_id"}
            call = self.iot.command_actuator(str(directive["actuator_id"]), wire_body)
        elif action == "readings":
            kind = body.get("kind")
            call = self.iot.readings(kind if isinstance(kind, str) else None)
        elif action == "interpolate":
            position = body.get("position")
            kind = body.get("kind")
            if not isinstance(position, (list, tuple)) or len(position) != 3:
                raise BadRequest("interpolate needs position [x, y, z]")
            if not isinstance(kind, str):
                raise BadRequest("interpolate needs a kind")
            call = self.iot.interpolate(position, kind)
        else:
            raise BadRequest(f"unknown iot action {action!r}")
        return call.payload, call.attempts

    def _route_interface(self, session: Session, body: dict) -> dict:
        action = body.get("action")
        with self._lock:
            if action == "select":
                return self._select(session, body.get("object_id"))
            if action == "popup_open":
                object_id = body.get("object_id")
                panel = body.get("panel", "details")
                if object_id not in self.objects:
                    raise UnknownObject(f"no object {object_id!r}")
                if panel not in ("actions", "details"):
                    raise BadRequest(f"unknown popup panel {panel!r}")
                if session.selection != object_id:
                    self._select(session, object_id)
                session.open_popup = (object_id, panel)
                return {"popup": {"object_id": object_id, "panel": panel}}
            if action == "popup_close":
                session.open_popup = None
                return {"popup": None}
            if action == "camera_move":
                pose = session.pose
                session.pose = clamp_pose(
                    pose.yaw + float(body.get("dyaw", 0.0)),
                    pose.pitch + float(body.get("dpitch", 0.0)),
                    pose.vfov + float(body.get("dvfov", 0.0)),
                    pose.viewport,
                )
                return {"pose": _pose_wire(session.pose)}
            if action == "pick":
                point = body.get("point", [0.5, 0.5])
                if not isinstance(point, (list, tuple)) or len(point) != 2:
                    raise BadRequest("pick needs point [u, v]")
                if isinstance(body.get("pose"), dict):
                    session.pose = _pose_from_wire(body["pose"], session.pose)
                picked = self.pick_at(session.id, (float(point[0]), float(point[1])))
                return {"picked": picked, "selection": session.selection}
            raise BadRequest(f"unknown interface action {action!r}")

    def _select(self, session: Session, object_id: str | None) -> dict:
        if object_id is not None and object_id not in self.objects:
            raise UnknownObject(f"no object {object_id!r}")
        if session.selection != object_id:
            previous = session.selection
            if previous is not None:
                self._highlight[previous] = transition(self._highlight[previous], "hover_off")
            if object_id is not None:
                self._highlight[object_id] = transition(self._highlight[object_id], "hover_on")
            session.selection = object_id
            if session.open_popup is not None and session.open_popup[0] != object_id:
                session.open_popup = None
        return {
            "selection": session.selection,
            "highlight": self._highlight[object_id].to_wire() if object_id else None,
        }

    def pick_at(self, session_id: str, screen_point: tuple[float, float]) -> str | None:
        """Screen-point pick using the session pose and the rig position."""
        session = self.session(session_id)
        with self._lock:
            ray = ray_from_view(self.camera_pos, session.pose, screen_point)
            picked = pick(ray, list(self.objects.values()))
            self._select(session, picked)
            return picked

    # ----------------------------------------------------------- twin reads

    def object_summaries(self) -> list[dict]:
        with self._lock:
            return [
                {
                    "id": obj.id,
                    "label": obj.label,
                    "bounds": {"min": list(obj.bounds[0]), "max": list(obj.bounds[1])},
                    "linked_sensors": list(obj.linked_sensors),
                    "linked_actuators": list(obj.linked_actuators),
                    "target_ranges": {
                        k: {"lo": lo, "hi": hi}
                        for k, (lo, hi) in sorted(obj.target_ranges.items())
                    },
                    "highlight": self._highlight[obj.id].to_wire(),
                }
                for obj in self.objects.values()
            ]

    def _evaluate_object(self, obj: InteractableObject) -> tuple[dict, list[str], object]:
        """Interpolated values at the object's center, per configured kind."""
        values: dict[str, float] = {}
        unavailable: list[str] = []
        for kind in sorted(obj.target_ranges):
            try:
                call = self.iot.interpolate(obj.center, kind, origin="twin")
                values[kind] = call.payload["value"]
            except (IotRejected, IotUnreachable):
                unavailable.append(kind)
        severity = compute_severity(
            obj.target_ranges, values, colors=self.severity_colors
        )
        return values, unavailable, severity

    def object_details(self, object_id: str) -> dict:
        obj = self.objects.get(object_id)
        if obj is None:
            raise UnknownObject(f"no object {object_id!r}")
        values, unavailable, severity = self._evaluate_object(obj)
        devices = self.iot.list_devices(origin="twin").payload
        linked = [
            a for a in devices.get("actuators", []) if a["id"] in obj.linked_actuators
        ]
        sensors = [
            s for s in devices.get("sensors", []) if s["id"] in obj.linked_sensors
        ]
        with self._lock:
            highlight = self._highlight[object_id].to_wire()
        return {
            "id": obj.id,
            "label": obj.label,
            "bounds": {"min": list(obj.bounds[0]), "max": list(obj.bounds[1])},
            "center": list(obj.center),
            "values": {
                kind: {"value": values.get(kind), "available": kind in values}
                for kind in sorted(obj.target_ranges)
            },
            "unavailable_kinds": unavailable,
            "severity": severity.to_wire(),
            "highlight": highlight,
            "linked_actuators": linked,
            "linked_sensors": sensors,
        }

    def object_actions(self, object_id: str) -> list[dict]:
        obj = self.objects.get(object_id)
        if obj is None:
            raise UnknownObject(f"no object {object_id!r}")
        devices = self.iot.list_devices(origin="twin").payload
        by_id = {a["id"]: a for a in devices.get("actuators", [])}
        actions = []
        for actuator_id in sorted(obj.linked_actuators):
            info = by_id.get(actuator_id)
            if info is None:
                continue
            mode = info.get("mode")
            has_condition = info.get("condition") is not None
            has_period = info.get("period") is not None
            for option in (
                {"mode": "on"},
                {"mode": "off"},
                {"mode": "auto", "requires": "condition"},
                {"mode": "auto", "requires": "period"},
            ):
                if option["mode"] == "auto":
                    current = mode == "auto" and (
                        (option["requires"] == "condition" and has_condition)
                        or (option["requires"] == "period" and has_period)
                    )
                else:
                    current = mode == option["mode"]
                actions.append(
                    {
                        "actuator_id": actuator_id,
                        "kind": info.get("kind"),
                        **option,
                        "current": current,
                    }
                )
        return actions

    # ------------------------------------------------------------ snapshots

    def on_tick(self, sim_time: float) -> dict | None:
        """Advance the twin clock; publish a snapshot when cadence is due."""
        with self._lock:
            self._sim_time = sim_time
            due = self.cadence is not None and (
                self._last_snapshot_at is None
                or sim_time - self._last_snapshot_at >= self.cadence - 1e-9
            )
            if due:
                self._last_snapshot_at = sim_time
        if due:
            return self.publish_snapshot()
        return None

    def build_snapshot(self) -> dict:
        devices = self.iot.list_devices(origin="twin").payload
        objects_out = []
        with self._lock:
            sim_time = self._sim_time
            selected = {s.selection for s in self._sessions.values() if s.selection}
        for obj in self.objects.values():
            values, unavailable, severity = self._evaluate_object(obj)
            with self._lock:
                state = self._highlight[obj.id]
                if severity.level != "none":
                    state = transition(state, "issue_raised", severity.level)
                elif state.mode == "issue":
                    state = transition(state, "issue_cleared")
                    if obj.id in selected:
                        state = transition(state, "hover_on")
                self._highlight[obj.id] = state
                objects_out.append(
                    {
                        "id": obj.id,
                        "label": obj.label,
                        "highlight": state.to_wire(),
                        "severity": severity.to_wire(),
                        "values": {k: values[k] for k in sorted(values)},
                        "unavailable_kinds": unavailable,
                    }
                )
        actuators = [
            {"id": a["id"], "mode": a["mode"], "active": a["active"]}
            for a in devices.get("actuators", [])
        ]
        return {
            "timestamp": sim_time,
            "objects": objects_out,
            "actuators": actuators,
            "panorama_version": self.store.version,
        }

    def publish_snapshot(self) -> dict:
        snapshot = self.build_snapshot()
        with self._lock:
            sessions = list(self._sessions.values())
        for session in sessions:
            session.channel.send("snapshot", snapshot)
        return snapshot


def _pose_wire(pose: ViewPose) -> dict:
    return {
        "yaw": pose.yaw,
        "pitch": pose.pitch,
        "vfov": pose.vfov,
        "viewport": list(pose.viewport),
    }


def _pose_from_wire(body: dict, current: ViewPose) -> ViewPose:
    viewport = current.viewport
    if isinstance(body.get("viewport"), (list, tuple)) and len(body["viewport"]) == 2:
        viewport = (int(body["viewport"][0]), int(body["viewport"][1]))
    return clamp_pose(
        float(body.get("yaw", current.yaw)),
        float(body.get("pitch", current.pitch)),
        float(body.get("vfov", current.vfov)),
        viewport,
    )
