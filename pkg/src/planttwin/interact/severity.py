"""Issue severity: how far object readings sit outside their target bands.

The deviation of a value is its excursion past the band, measured relative
to band width, so different field kinds compare on one scale. The worst
kind decides the level; the level decides the color the operator sees.
"""
from __future__ import annotations

from dataclasses import dataclass

from planttwin.errors import MissingTargetRange

LEVELS = ("none", "warning", "critical")

# warning above 0, critical above this relative excursion
CRITICAL_EXCURSION = 0.25

DEFAULT_SEVERITY_COLORS: dict[str, tuple[int, int, int]] = {
    "none": (0, 170, 0),
    "warning": (255, 170, 0),
    "critical": (220, 0, 0),
}


@dataclass(frozen=True)
class Severity:
    level: str
    color: tuple[int, int, int]

    def to_wire(self) -> dict:
        return {"level": self.level, "color": list(self.color)}


def relative_excursion(value: float, lo: float, hi: float) -> float:
    """How far outside (lo, hi) a value sits, in band widths; <= 0 inside."""
    width = hi - lo
    return max((lo - value) / width, (value - hi) / width)


def compute_severity(
    target_ranges: dict[str, tuple[float, float]],
    values: dict[str, float],
    critical_excursion: float = CRITICAL_EXCURSION,
    colors: dict[str, tuple[int, int, int]] | None = None,
) -> Severity:
    palette = colors if colors is not None else DEFAULT_SEVERITY_COLORS
    worst = -float("inf")
    for kind, value in values.items():
        if kind not in target_ranges:
            raise MissingTargetRange(f"no target range for kind {kind!r}")
        lo, hi = target_ranges[kind]
        worst = max(worst, relative_excursion(value, lo, hi))
    if not values or worst <= 0.0:
        level = "none"
    elif worst <= critical_excursion:
        level = "warning"
    else:
        level = "critical"
    return Severity(level=level, color=palette[level])
