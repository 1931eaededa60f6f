"""Simulated plant factory.

Scalar environment fields over a 3D box, sampled by sensors and perturbed
by actuators, advanced by a deterministic tick loop. The world is an
immutable value: `tick` returns a new world, so published snapshots can be
shared across threads without locking.

Field model: baseline + linear gradient + one radially decaying bump per
actuator. The bump magnitude integrates amplitude while the actuator is
active and decays exponentially (half-life 30 s) while it is off.
"""
from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, replace

from planttwin.errors import InvalidDirective, OutOfExtent, UnknownActuator, UnknownFieldKind
from planttwin.geometry import Vec3, distance
from planttwin.iot.registry import ActuatorDirective, SensorMeta, SensorReading

# Decay half-life of an actuator's accumulated perturbation once it turns
# off. Chosen so a few minutes of simulated time visibly relaxes the field.
OFF_DECAY_HALF_LIFE_S = 30.0

# Field kinds the demo scenarios use; the world accepts any unique set.
KNOWN_FIELD_KINDS = ("temperature", "humidity", "co2", "ec", "ph")


@dataclass(frozen=True)
class EnvironmentField:
    """One scalar field: value(p) = base + gradient . p + actuator bumps."""

    kind: str
    base: float
    gradient: Vec3 = (0.0, 0.0, 0.0)


@dataclass(frozen=True)
class SimActuator:
    """A controllable device that perturbs one field around its position."""

    id: str
    position: Vec3
    kind: str  # heater, humidifier, co2_injector, led_bank, pump, vent
    target_kind: str
    amplitude: float  # field units per active second, may be negative
    decay_radius: float  # meters; perturbation is exactly 0 beyond this
    mode: str = "off"  # on | off | auto
    condition: tuple[str, str, float] | None = None
    period: tuple[float, float] | None = None

    def __post_init__(self):
        if self.decay_radius <= 0:
            raise ValueError(f"actuator {self.id}: decay_radius must be > 0")
        if not math.isfinite(self.amplitude):
            raise ValueError(f"actuator {self.id}: amplitude must be finite")
        if self.mode == "auto" and (self.condition is None) == (self.period is None):
            raise ValueError(
                f"actuator {self.id}: mode=auto needs exactly one of condition/period"
            )


@dataclass(frozen=True)
class ActuatorRuntime:
    """An actuator plus its accumulated perturbation state."""

    spec: SimActuator
    magnitude: float = 0.0  # current bump height at the actuator position
    active: bool = False  # as evaluated at the start of the last tick


@dataclass(frozen=True)
class FactoryConfig:
    extent: Vec3
    tick_interval: float
    seed: int
    fields: tuple[EnvironmentField, ...]

    def __post_init__(self):
        if any(dim <= 0 for dim in self.extent):
            raise ValueError("extent dimensions must be > 0")
        if self.tick_interval <= 0:
            raise ValueError("tick_interval must be > 0")
        kinds = [f.kind for f in self.fields]
        if len(set(kinds)) != len(kinds):
            raise ValueError("field kinds must be unique")


@dataclass(frozen=True)
class World:
    config: FactoryConfig
    actuators: tuple[ActuatorRuntime, ...]  # sorted by id
    time: float = 0.0

    def field(self, kind: str) -> EnvironmentField:
        for f in self.config.fields:
            if f.kind == kind:
                return f
        raise UnknownFieldKind(f"no field of kind {kind!r}")

    def actuator(self, actuator_id: str) -> ActuatorRuntime:
        for a in self.actuators:
            if a.spec.id == actuator_id:
                return a
        raise UnknownActuator(f"no actuator {actuator_id!r}")

    def contains(self, p: Vec3) -> bool:
        ex, ey, ez = self.config.extent
        return 0.0 <= p[0] <= ex and 0.0 <= p[1] <= ey and 0.0 <= p[2] <= ez

    def state_dict(self) -> dict:
        """Full state as plain data; equal worlds serialize identically."""
        return {
            "time": self.time,
            "actuators": [
                {
                    "id": a.spec.id,
                    "mode": a.spec.mode,
                    "condition": list(a.spec.condition) if a.spec.condition else None,
                    "period": list(a.spec.period) if a.spec.period else None,
                    "magnitude": a.magnitude,
                    "active": a.active,
                }
                for a in self.actuators
            ],
        }

    def state_json(self) -> str:
        return json.dumps(self.state_dict(), sort_keys=True)


def build_world(config: FactoryConfig, actuators: list[SimActuator]) -> World:
    runtimes = tuple(
        ActuatorRuntime(spec=a) for a in sorted(actuators, key=lambda a: a.id)
    )
    ids = [r.spec.id for r in runtimes]
    if len(set(ids)) != len(ids):
        raise ValueError("actuator ids must be unique")
    for r in runtimes:
        if r.spec.target_kind not in {f.kind for f in config.fields}:
            raise ValueError(
                f"actuator {r.spec.id} targets unconfigured field {r.spec.target_kind!r}"
            )
    return World(config=config, actuators=runtimes)


def falloff(d: float, radius: float) -> float:
    """Smooth cubic-like falloff (1 - (d/r)^2)^2, exactly 0 at d >= r."""
    if d >= radius:
        return 0.0
    u = d / radius
    s = 1.0 - u * u
    return s * s


def field_value(world: World, kind: str, position: Vec3) -> float:
    """Noiseless closed-form field evaluation at a point."""
    f = world.field(kind)
    gx, gy, gz = f.gradient
    value = f.base + gx * position[0] + gy * position[1] + gz * position[2]
    for a in world.actuators:
        if a.spec.target_kind != kind or a.magnitude == 0.0:
            continue
        w = falloff(distance(position, a.spec.position), a.spec.decay_radius)
        if w > 0.0:
            value += a.magnitude * w
    return value


def _is_active(world: World, spec: SimActuator, now: float) -> bool:
    if spec.mode == "on":
        return True
    if spec.mode == "off":
        return False
    if spec.condition is not None:
        kind, op, threshold = spec.condition
        current = field_value(world, kind, spec.position)
        return current < threshold if op == "<" else current > threshold
    on_s, off_s = spec.period  # type: ignore[misc]  # auto implies one is set
    phase = math.fmod(now, on_s + off_s)
    return phase < on_s


def tick(world: World, dt: float) -> World:
    """Advance the world by dt seconds.

    Activation is evaluated against the pre-tick world, then each active
    actuator integrates amplitude * dt into its bump; inactive bumps decay
    toward zero. Pure state transition: no wall clock, no hidden state.
    """
    if dt <= 0:
        raise ValueError("dt must be > 0")
    decay = 0.5 ** (dt / OFF_DECAY_HALF_LIFE_S)
    updated = []
    for a in world.actuators:
        active = _is_active(world, a.spec, world.time)
        if active:
            magnitude = a.magnitude + a.spec.amplitude * dt
        else:
            magnitude = a.magnitude * decay
        updated.append(replace(a, magnitude=magnitude, active=active))
    return replace(world, actuators=tuple(updated), time=world.time + dt)


def sample_sensor(world: World, sensor: SensorMeta) -> SensorReading:
    """Sample the field at a sensor: closed-form value + seeded noise.

    Noise is keyed on (world seed, sensor id, timestamp) so identical runs
    replay bit-for-bit regardless of sampling order.
    """
    if not world.contains(sensor.position):
        raise OutOfExtent(f"sensor {sensor.id} at {sensor.position} is outside extent")
    value = field_value(world, sensor.kind, sensor.position)
    if sensor.sigma > 0.0:
        key = f"{world.config.seed}:{sensor.id}:{float(world.time).hex()}"
        value += random.Random(key).gauss(0.0, sensor.sigma)
    return SensorReading(
        sensor_id=sensor.id, kind=sensor.kind, value=value, timestamp=world.time
    )


def set_sim_actuator(world: World, directive: ActuatorDirective) -> World:
    """Apply a mode directive; takes effect at the next tick."""
    problem = directive.validate()
    if problem is not None:
        raise InvalidDirective(problem)
    target = world.actuator(directive.actuator_id)  # raises UnknownActuator
    new_spec = replace(
        target.spec,
        mode=directive.mode,
        condition=directive.condition if directive.mode == "auto" else None,
        period=directive.period if directive.mode == "auto" else None,
    )
    updated = tuple(
        replace(a, spec=new_spec) if a.spec.id == directive.actuator_id else a
        for a in world.actuators
    )
    return replace(world, actuators=updated)
