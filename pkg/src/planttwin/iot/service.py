"""IoT server core: device registry, latest telemetry, interpolation.

The registry is immutable after startup. Telemetry is ingested once per
tick by sampling every sensor against the world snapshot, standing in for
devices pushing readings. Readings older than STALE_TICKS tick intervals
are excluded from interpolation.
"""
from __future__ import annotations

import threading

from planttwin.errors import (
    InvalidDirective,
    NoSensorsOfKind,
    OutOfExtent,
    UnknownActuator,
    UnknownFieldKind,
)
from planttwin.farm.host import WorldHost
from planttwin.farm.world import World, sample_sensor
from planttwin.geometry import Vec3
from planttwin.iot.interpolate import idw
from planttwin.iot.registry import ActuatorDirective, SensorMeta, SensorReading

STALE_TICKS = 10


class IotService:
    def __init__(self, host: WorldHost, sensors: list[SensorMeta]):
        ids = [s.id for s in sensors]
        if len(set(ids)) != len(ids):
            raise ValueError("sensor ids must be unique")
        world = host.snapshot()
        kinds = {f.kind for f in world.config.fields}
        for sensor in sensors:
            if sensor.kind not in kinds:
                raise ValueError(f"sensor {sensor.id} measures unconfigured kind {sensor.kind!r}")
            if not world.contains(sensor.position):
                raise ValueError(f"sensor {sensor.id} position outside factory extent")
        self.host = host
        self.sensors = tuple(sorted(sensors, key=lambda s: s.id))
        self._latest: dict[str, SensorReading] = {}
        self._lock = threading.Lock()
        # directive application serialized per actuator id; last writer wins
        self._directive_locks: dict[str, threading.Lock] = {}
        self._directive_guard = threading.Lock()

    @property
    def field_kinds(self) -> set[str]:
        return {f.kind for f in self.host.snapshot().config.fields}

    def ingest_tick(self, world: World | None = None) -> None:
        """Sample every sensor against the (post-tick) world snapshot."""
        snapshot = world if world is not None else self.host.snapshot()
        fresh = {s.id: sample_sensor(snapshot, s) for s in self.sensors}
        with self._lock:
            self._latest.update(fresh)

    def list_devices(self) -> dict:
        world = self.host.snapshot()
        actuators = []
        for runtime in world.actuators:  # already sorted by id
            spec = runtime.spec
            actuators.append(
                {
                    "id": spec.id,
                    "kind": spec.kind,
                    "position": list(spec.position),
                    "target_kind": spec.target_kind,
                    "amplitude": spec.amplitude,
                    "decay_radius": spec.decay_radius,
                    "mode": spec.mode,
                    "active": runtime.active,
                }
            )
        return {
            "sensors": [s.to_wire() for s in self.sensors],
            "actuators": actuators,
        }

    def latest_readings(self, kind: str | None = None) -> list[SensorReading]:
        if kind is not None and kind not in self.field_kinds:
            raise UnknownFieldKind(f"no field of kind {kind!r}")
        with self._lock:
            latest = dict(self._latest)
        readings = [
            latest[s.id]
            for s in self.sensors
            if s.id in latest and (kind is None or s.kind == kind)
        ]
        return readings

    def command_actuator(self, directive: ActuatorDirective) -> dict:
        problem = directive.validate()
        if problem is not None:
            raise InvalidDirective(problem)
        with self._directive_guard:
            lock = self._directive_locks.setdefault(directive.actuator_id, threading.Lock())
        with lock:
            world = self.host.apply_directive(directive)  # raises UnknownActuator
        return {
            "actuator_id": directive.actuator_id,
            "applied_mode": directive.mode,
            "at": world.time,
        }

    def interpolate(self, position: Vec3, kind: str) -> dict:
        world = self.host.snapshot()
        if kind not in self.field_kinds:
            raise UnknownFieldKind(f"no field of kind {kind!r}")
        if not world.contains(position):
            raise OutOfExtent(f"query {position} is outside the factory extent")
        horizon = world.time - STALE_TICKS * world.config.tick_interval
        with self._lock:
            latest = dict(self._latest)
        samples = []
        for sensor in self.sensors:
            if sensor.kind != kind:
                continue
            reading = latest.get(sensor.id)
            if reading is None or reading.timestamp < horizon:
                continue
            samples.append((sensor.id, sensor.position, reading.value))
        if not samples:
            raise NoSensorsOfKind(f"no fresh readings of kind {kind!r}")
        value, weights = idw(samples, position)
        return {
            "value": value,
            "kind": kind,
            "contributing": [{"sensor_id": sid, "weight": w} for sid, w in weights],
        }

    def sim_time(self) -> float:
        return self.host.snapshot().time
