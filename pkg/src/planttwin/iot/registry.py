"""Device registry: sensor and actuator metadata, immutable after startup."""
from __future__ import annotations

from dataclasses import dataclass

from planttwin.geometry import Vec3


@dataclass(frozen=True)
class SensorMeta:
    """A physical sensor: where it sits and what it measures."""

    id: str
    position: Vec3
    kind: str
    sigma: float = 0.0

    def to_wire(self) -> dict:
        return {
            "id": self.id,
            "position": list(self.position),
            "kind": self.kind,
            "sigma": self.sigma,
        }


@dataclass(frozen=True)
class SensorReading:
    sensor_id: str
    kind: str
    value: float
    timestamp: float

    def to_wire(self) -> dict:
        return {
            "sensor_id": self.sensor_id,
            "kind": self.kind,
            "value": self.value,
            "timestamp": self.timestamp,
        }


@dataclass(frozen=True)
class ActuatorDirective:
    """A requested actuator mode change.

    mode "auto" requires exactly one of condition/period; "on"/"off"
    require neither.
    """

    actuator_id: str
    mode: str
    condition: tuple[str, str, float] | None = None  # (kind, op, threshold)
    period: tuple[float, float] | None = None  # (on seconds, off seconds)

    def validate(self) -> str | None:
        """Return a problem description, or None if well-formed."""
        if self.mode not in ("on", "off", "auto"):
            return f"unknown mode {self.mode!r}"
        if self.mode == "auto":
            if (self.condition is None) == (self.period is None):
                return "mode=auto requires exactly one of condition/period"
            if self.condition is not None:
                kind, op, threshold = self.condition
                if op not in ("<", ">"):
                    return f"condition comparator must be '<' or '>', got {op!r}"
                if not _finite(threshold):
                    return "condition threshold must be finite"
            if self.period is not None:
                on_s, off_s = self.period
                if on_s <= 0 or off_s <= 0:
                    return "period durations must be > 0"
        elif self.condition is not None or self.period is not None:
            return f"mode={self.mode} takes no condition or period"
        return None

    def to_wire(self) -> dict:
        body: dict = {"mode": self.mode}
        if self.condition is not None:
            kind, op, threshold = self.condition
            body["condition"] = {"kind": kind, "op": op, "threshold": threshold}
        if self.period is not None:
            body["period"] = {"on_s": self.period[0], "off_s": self.period[1]}
        return body

    @classmethod
    def from_wire(cls, actuator_id: str, body: dict) -> "ActuatorDirective":
        condition = None
        if isinstance(body.get("condition"), dict):
            c = body["condition"]
            condition = (
                str(c.get("kind")),
                str(c.get("op")),
                float(c.get("threshold", 0.0)),
            )
        period = None
        if isinstance(body.get("period"), dict):
            p = body["period"]
            period = (float(p.get("on_s", 0.0)), float(p.get("off_s", 0.0)))
        return cls(
            actuator_id=actuator_id,
            mode=str(body.get("mode", "")),
            condition=condition,
            period=period,
        )


def _finite(x: float) -> bool:
    return x == x and x not in (float("inf"), float("-inf"))
