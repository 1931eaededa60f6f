"""Interactable objects: named boxes in factory coordinates linked to
devices, each carrying acceptable-band target ranges per field kind."""
from __future__ import annotations

from dataclasses import dataclass, field

from planttwin.geometry import Vec3


@dataclass(frozen=True)
class InteractableObject:
    id: str
    label: str
    bounds: tuple[Vec3, Vec3]  # (min xyz, max xyz), meters
    linked_sensors: tuple[str, ...] = ()
    linked_actuators: tuple[str, ...] = ()
    target_ranges: dict[str, tuple[float, float]] = field(default_factory=dict)

    def __post_init__(self):
        lo, hi = self.bounds
        if not all(a < b for a, b in zip(lo, hi)):
            raise ValueError(f"object {self.id}: bounds min must be < max per axis")
        for kind, (rlo, rhi) in self.target_ranges.items():
            if not rlo < rhi:
                raise ValueError(f"object {self.id}: target range for {kind} is empty")

    @property
    def center(self) -> Vec3:
        lo, hi = self.bounds
        return ((lo[0] + hi[0]) / 2.0, (lo[1] + hi[1]) / 2.0, (lo[2] + hi[2]) / 2.0)

    def corners(self) -> list[Vec3]:
        lo, hi = self.bounds
        return [
            (x, y, z)
            for x in (lo[0], hi[0])
            for y in (lo[1], hi[1])
            for z in (lo[2], hi[2])
        ]
