"""Inverse-distance-weighted interpolation of scattered sensor values.

Shepard weighting with power p=2 over every sensor of the queried kind.
Sensor counts are desk-scale, so no k-nearest cutoff and no spatial index.
A query within EXACT_HIT_EPS of a sensor returns that sensor's value
directly, which both defines values at sensor positions and avoids the
1/d^2 singularity.
"""
from __future__ import annotations

from planttwin.geometry import Vec3, distance

POWER = 2
EXACT_HIT_EPS = 1e-6  # meters


def idw(samples: list[tuple[str, Vec3, float]], query: Vec3) -> tuple[float, list[tuple[str, float]]]:
    """Interpolate at `query` from (sensor_id, position, value) samples.

    Returns (value, [(sensor_id, weight)]) with nonnegative weights that
    sum to 1. Samples are processed in sensor-id order so the result is
    independent of input ordering, bit for bit.
    """
    if not samples:
        raise ValueError("idw needs at least one sample")
    ordered = sorted(samples, key=lambda s: s[0])

    nearest = min(ordered, key=lambda s: (distance(s[1], query), s[0]))
    if distance(nearest[1], query) <= EXACT_HIT_EPS:
        return nearest[2], [(nearest[0], 1.0)]

    raw = [(sid, distance(pos, query) ** -POWER, value) for sid, pos, value in ordered]
    total = sum(w for _, w, _ in raw)
    weights = [(sid, w / total) for sid, w, _ in raw]
    value = sum(w * v for _, w, v in raw) / total
    return value, weights
