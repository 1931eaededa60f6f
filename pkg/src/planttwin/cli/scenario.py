"""Scenario files: the one JSON document describing a whole twin setup.

Validation is strict: unknown keys are rejected and every failure names
the offending field with a JSON pointer.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

from planttwin.errors import InvalidScenario
from planttwin.farm.world import EnvironmentField, FactoryConfig, SimActuator
from planttwin.geometry import Vec3, normalize_yaw
from planttwin.interact.objects import InteractableObject
from planttwin.iot.registry import SensorMeta


@dataclass(frozen=True)
class CameraRig:
    position: Vec3
    capture_yaws: tuple[float, ...]
    hfov: float
    frame_size: tuple[int, int] = (256, 256)


@dataclass(frozen=True)
class RunParams:
    cadence_s: float = 1.0
    queue_depth: int = 16
    panorama_height: int = 512
    backend: str = "panorama"
    iot_port: int = 0
    interface_port: int = 0
    time_scale: float = 1.0
    max_sim_s: float = 600.0


@dataclass(frozen=True)
class Scenario:
    name: str
    factory: FactoryConfig
    sensors: tuple[SensorMeta, ...]
    actuators: tuple[SimActuator, ...]
    objects: tuple[InteractableObject, ...]
    camera: CameraRig
    run: RunParams = field(default_factory=RunParams)


def load_scenario(path: str) -> Scenario:
    try:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise InvalidScenario("", f"cannot read scenario file: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InvalidScenario("", f"scenario is not valid JSON: {exc}") from exc
    return parse_scenario(raw)


def parse_scenario(raw: dict) -> Scenario:
    _require_keys(raw, "", required={"factory", "sensors", "actuators", "objects", "camera"},
                  optional={"name", "run"})
    factory = _parse_factory(_get(raw, "", "factory", dict))
    kinds = {f.kind for f in factory.fields}

    sensors = []
    for i, entry in enumerate(_get(raw, "", "sensors", list)):
        sensors.append(_parse_sensor(entry, f"/sensors/{i}", factory, kinds))
    _unique([s.id for s in sensors], "/sensors", "sensor id")

    actuators = []
    for i, entry in enumerate(_get(raw, "", "actuators", list)):
        actuators.append(_parse_actuator(entry, f"/actuators/{i}", factory, kinds))
    _unique([a.id for a in actuators], "/actuators", "actuator id")

    sensor_ids = {s.id for s in sensors}
    actuator_ids = {a.id for a in actuators}
    objects = []
    for i, entry in enumerate(_get(raw, "", "objects", list)):
        objects.append(
            _parse_object(entry, f"/objects/{i}", kinds, sensor_ids, actuator_ids)
        )
    _unique([o.id for o in objects], "/objects", "object id")

    camera = _parse_camera(_get(raw, "", "camera", dict), factory)
    run = _parse_run(raw.get("run", {}))
    return Scenario(
        name=str(raw.get("name", "scenario")),
        factory=factory,
        sensors=tuple(sensors),
        actuators=tuple(actuators),
        objects=tuple(objects),
        camera=camera,
        run=run,
    )


# ------------------------------------------------------------------ sections

def _parse_factory(raw: dict) -> FactoryConfig:
    _require_keys(raw, "/factory", required={"extent", "tick_interval", "seed", "fields"})
    extent = _vec3(raw, "/factory", "extent")
    fields = []
    for i, entry in enumerate(_list_of_dicts(raw, "/factory", "fields")):
        pointer = f"/factory/fields/{i}"
        _require_keys(entry, pointer, required={"kind", "base"}, optional={"gradient"})
        gradient = _vec3(entry, pointer, "gradient") if "gradient" in entry else (0.0, 0.0, 0.0)
        fields.append(
            EnvironmentField(
                kind=_string(entry, pointer, "kind"),
                base=_number(entry, pointer, "base"),
                gradient=gradient,
            )
        )
    try:
        return FactoryConfig(
            extent=extent,
            tick_interval=_number(raw, "/factory", "tick_interval"),
            seed=int(_number(raw, "/factory", "seed")),
            fields=tuple(fields),
        )
    except ValueError as exc:
        raise InvalidScenario("/factory", str(exc)) from exc


def _parse_sensor(raw, pointer: str, factory: FactoryConfig, kinds: set) -> SensorMeta:
    _require_dict(raw, pointer)
    _require_keys(raw, pointer, required={"id", "position", "kind"}, optional={"sigma"})
    kind = _string(raw, pointer, "kind")
    if kind not in kinds:
        raise InvalidScenario(f"{pointer}/kind", f"unconfigured field kind {kind!r}")
    position = _vec3(raw, pointer, "position")
    if not _inside(position, factory.extent):
        raise InvalidScenario(f"{pointer}/position", "outside the factory extent")
    sigma = _number(raw, pointer, "sigma") if "sigma" in raw else 0.0
    if sigma < 0:
        raise InvalidScenario(f"{pointer}/sigma", "sigma must be >= 0")
    return SensorMeta(id=_string(raw, pointer, "id"), position=position, kind=kind, sigma=sigma)


def _parse_actuator(raw, pointer: str, factory: FactoryConfig, kinds: set) -> SimActuator:
    _require_dict(raw, pointer)
    _require_keys(
        raw, pointer,
        required={"id", "position", "kind", "target_kind", "amplitude", "decay_radius"},
        optional={"mode", "condition", "period"},
    )
    target = _string(raw, pointer, "target_kind")
    if target not in kinds:
        raise InvalidScenario(f"{pointer}/target_kind", f"unconfigured field kind {target!r}")
    position = _vec3(raw, pointer, "position")
    if not _inside(position, factory.extent):
        raise InvalidScenario(f"{pointer}/position", "outside the factory extent")
    condition = None
    if "condition" in raw:
        c = raw["condition"]
        _require_dict(c, f"{pointer}/condition")
        _require_keys(c, f"{pointer}/condition", required={"kind", "op", "threshold"})
        if c["kind"] not in kinds:
            raise InvalidScenario(f"{pointer}/condition/kind", f"unconfigured field kind {c['kind']!r}")
        if c["op"] not in ("<", ">"):
            raise InvalidScenario(f"{pointer}/condition/op", "comparator must be '<' or '>'")
        condition = (str(c["kind"]), str(c["op"]), _number(c, f"{pointer}/condition", "threshold"))
    period = None
    if "period" in raw:
        p = raw["period"]
        _require_dict(p, f"{pointer}/period")
        _require_keys(p, f"{pointer}/period", required={"on_s", "off_s"})
        period = (_number(p, f"{pointer}/period", "on_s"), _number(p, f"{pointer}/period", "off_s"))
        if period[0] <= 0 or period[1] <= 0:
            raise InvalidScenario(f"{pointer}/period", "durations must be > 0")
    try:
        return SimActuator(
            id=_string(raw, pointer, "id"),
            position=position,
            kind=_string(raw, pointer, "kind"),
            target_kind=target,
            amplitude=_number(raw, pointer, "amplitude"),
            decay_radius=_number(raw, pointer, "decay_radius"),
            mode=str(raw.get("mode", "off")),
            condition=condition,
            period=period,
        )
    except ValueError as exc:
        raise InvalidScenario(pointer, str(exc)) from exc


def _parse_object(raw, pointer: str, kinds, sensor_ids, actuator_ids) -> InteractableObject:
    _require_dict(raw, pointer)
    _require_keys(
        raw, pointer,
        required={"id", "bounds"},
        optional={"label", "linked_sensors", "linked_actuators", "target_ranges"},
    )
    bounds_raw = _get(raw, pointer, "bounds", dict)
    _require_keys(bounds_raw, f"{pointer}/bounds", required={"min", "max"})
    bounds = (_vec3(bounds_raw, f"{pointer}/bounds", "min"), _vec3(bounds_raw, f"{pointer}/bounds", "max"))
    linked_sensors = tuple(str(s) for s in raw.get("linked_sensors", []))
    for j, sid in enumerate(linked_sensors):
        if sid not in sensor_ids:
            raise InvalidScenario(f"{pointer}/linked_sensors/{j}", f"unknown sensor {sid!r}")
    linked_actuators = tuple(str(a) for a in raw.get("linked_actuators", []))
    for j, aid in enumerate(linked_actuators):
        if aid not in actuator_ids:
            raise InvalidScenario(f"{pointer}/linked_actuators/{j}", f"unknown actuator {aid!r}")
    ranges = {}
    for kind, band in raw.get("target_ranges", {}).items():
        band_pointer = f"{pointer}/target_ranges/{kind}"
        if kind not in kinds:
            raise InvalidScenario(band_pointer, f"unconfigured field kind {kind!r}")
        _require_dict(band, band_pointer)
        _require_keys(band, band_pointer, required={"lo", "hi"})
        ranges[str(kind)] = (_number(band, band_pointer, "lo"), _number(band, band_pointer, "hi"))
    object_id = _string(raw, pointer, "id")
    try:
        return InteractableObject(
            id=object_id,
            label=str(raw.get("label", object_id)),
            bounds=bounds,
            linked_sensors=linked_sensors,
            linked_actuators=linked_actuators,
            target_ranges=ranges,
        )
    except ValueError as exc:
        raise InvalidScenario(pointer, str(exc)) from exc


def _parse_camera(raw: dict, factory: FactoryConfig) -> CameraRig:
    _require_keys(raw, "/camera", required={"position", "capture_yaws", "hfov"},
                  optional={"frame_size"})
    position = _vec3(raw, "/camera", "position")
    if not _inside(position, factory.extent):
        raise InvalidScenario("/camera/position", "outside the factory extent")
    yaws = raw["capture_yaws"]
    if not isinstance(yaws, list) or not yaws:
        raise InvalidScenario("/camera/capture_yaws", "must be a non-empty list")
    normalized = []
    for i, yaw in enumerate(yaws):
        if not isinstance(yaw, (int, float)):
            raise InvalidScenario(f"/camera/capture_yaws/{i}", "must be a number")
        normalized.append(normalize_yaw(float(yaw)))
    if len(set(normalized)) != len(normalized):
        raise InvalidScenario("/camera/capture_yaws", "capture yaws must be distinct")
    hfov = _number(raw, "/camera", "hfov")
    if not 0.0 < hfov < 180.0:
        raise InvalidScenario("/camera/hfov", "must be in (0, 180)")
    frame_size = (256, 256)
    if "frame_size" in raw:
        fs = raw["frame_size"]
        if not (isinstance(fs, list) and len(fs) == 2 and all(isinstance(v, int) and v > 0 for v in fs)):
            raise InvalidScenario("/camera/frame_size", "must be [width, height] positive ints")
        frame_size = (fs[0], fs[1])
    return CameraRig(
        position=position,
        capture_yaws=tuple(float(y) for y in yaws),
        hfov=hfov,
        frame_size=frame_size,
    )


def _parse_run(raw: dict) -> RunParams:
    _require_dict(raw, "/run")
    defaults = RunParams()
    _require_keys(
        raw, "/run", required=set(),
        optional={"cadence_s", "queue_depth", "panorama_height", "backend",
                  "iot_port", "interface_port", "time_scale", "max_sim_s"},
    )
    params = RunParams(
        cadence_s=_number(raw, "/run", "cadence_s") if "cadence_s" in raw else defaults.cadence_s,
        queue_depth=int(_number(raw, "/run", "queue_depth")) if "queue_depth" in raw else defaults.queue_depth,
        panorama_height=int(_number(raw, "/run", "panorama_height")) if "panorama_height" in raw else defaults.panorama_height,
        backend=str(raw.get("backend", defaults.backend)),
        iot_port=int(_number(raw, "/run", "iot_port")) if "iot_port" in raw else defaults.iot_port,
        interface_port=int(_number(raw, "/run", "interface_port")) if "interface_port" in raw else defaults.interface_port,
        time_scale=_number(raw, "/run", "time_scale") if "time_scale" in raw else defaults.time_scale,
        max_sim_s=_number(raw, "/run", "max_sim_s") if "max_sim_s" in raw else defaults.max_sim_s,
    )
    if params.cadence_s <= 0:
        raise InvalidScenario("/run/cadence_s", "must be > 0")
    if params.queue_depth < 1:
        raise InvalidScenario("/run/queue_depth", "must be >= 1")
    if params.panorama_height < 16:
        raise InvalidScenario("/run/panorama_height", "must be >= 16")
    if params.time_scale <= 0:
        raise InvalidScenario("/run/time_scale", "must be > 0")
    return params


# ------------------------------------------------------------------- helpers

def _require_dict(raw, pointer: str) -> None:
    if not isinstance(raw, dict):
        raise InvalidScenario(pointer, "must be an object")


def _require_keys(raw: dict, pointer: str, required: set, optional: set = frozenset()) -> None:
    _require_dict(raw, pointer)
    for key in required:
        if key not in raw:
            raise InvalidScenario(f"{pointer}/{key}", "missing required field")
    for key in raw:
        if key not in required and key not in optional:
            raise InvalidScenario(f"{pointer}/{key}", "unknown field")


def _get(raw: dict, pointer: str, key: str, expected_type) -> object:
    value = raw.get(key)
    if not isinstance(value, expected_type):
        raise InvalidScenario(f"{pointer}/{key}", f"must be a {expected_type.__name__}")
    return value


def _list_of_dicts(raw: dict, pointer: str, key: str) -> list:
    value = _get(raw, pointer, key, list)
    for i, entry in enumerate(value):
        _require_dict(entry, f"{pointer}/{key}/{i}")
    return value


def _string(raw: dict, pointer: str, key: str) -> str:
    value = raw.get(key)
    if not isinstance(value, str) or not value:
        raise InvalidScenario(f"{pointer}/{key}", "must be a non-empty string")
    return value


def _number(raw: dict, pointer: str, key: str) -> float:
    value = raw.get(key)
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        raise InvalidScenario(f"{pointer}/{key}", "must be a finite number")
    return float(value)


def _vec3(raw: dict, pointer: str, key: str) -> Vec3:
    value = raw.get(key)
    if not (isinstance(value, list) and len(value) == 3):
        raise InvalidScenario(f"{pointer}/{key}", "must be [x, y, z]")
    for component in value:
        if isinstance(component, bool) or not isinstance(component, (int, float)):
            raise InvalidScenario(f"{pointer}/{key}", "components must be numbers")
    return (float(value[0]), float(value[1]), float(value[2]))


def _inside(p: Vec3, extent: Vec3) -> bool:
    return all(0.0 <= c <= e for c, e in zip(p, extent))


def _unique(ids: list[str], pointer: str, what: str) -> None:
    seen = set()
    for i, item in enumerate(ids):
        if item in seen:
            raise InvalidScenario(f"{pointer}/{i}/id", f"duplicate {what} {item!r}")
        seen.add(item)
