"""Shared 3D geometry conventions.

One convention, used everywhere:

* factory frame: x, y, z in meters, z up
* yaw: degrees, counterclockwise about +z, yaw 0 faces +x
* pitch: degrees, positive upward, in [-90, 90]
* equirectangular raster: width = 2 * height, column 0 = yaw -180 deg,
  row 0 = pitch +90 deg, pixel centers at index + 0.5
"""
from __future__ import annotations

import math

Vec3 = tuple[float, float, float]


def wrap_degrees(angle: float) -> float:
    """Wrap an angle into (-180, 180]."""
    a = math.fmod(angle, 360.0)
    if a > 180.0:
        a -= 360.0
    elif a <= -180.0:
        a += 360.0
    return a


def normalize_yaw(angle: float) -> float:
    """Wrap an angle into [0, 360)."""
    a = math.fmod(angle, 360.0)
    if a < 0.0:
        a += 360.0
    return a


def direction_from_angles(yaw_deg: float, pitch_deg: float) -> Vec3:
    psi = math.radians(yaw_deg)
    theta = math.radians(pitch_deg)
    c = math.cos(theta)
    return (c * math.cos(psi), c * math.sin(psi), math.sin(theta))


def angles_from_direction(d: Vec3) -> tuple[float, float]:
    """Inverse of direction_from_angles; d need not be unit length."""
    x, y, z = d
    yaw = math.degrees(math.atan2(y, x))
    horiz = math.hypot(x, y)
    pitch = math.degrees(math.atan2(z, horiz))
    return yaw, pitch


def camera_basis(yaw_deg: float, pitch_deg: float) -> tuple[Vec3, Vec3, Vec3]:
    """Return (forward, right, up) unit vectors for a view pose.

    right stays horizontal (no roll); up = right x forward.
    """
    psi = math.radians(yaw_deg)
    theta = math.radians(pitch_deg)
    ct, st = math.cos(theta), math.sin(theta)
    cp, sp = math.cos(psi), math.sin(psi)
    forward = (ct * cp, ct * sp, st)
    right = (sp, -cp, 0.0)
    up = (-st * cp, -st * sp, ct)
    return forward, right, up


def vec_add(a: Vec3, b: Vec3) -> Vec3:
    return (a[0] + b[0], a[1] + b[1], a[2] + b[2])


def vec_sub(a: Vec3, b: Vec3) -> Vec3:
    return (a[0] - b[0], a[1] - b[1], a[2] - b[2])


def vec_scale(a: Vec3, s: float) -> Vec3:
    return (a[0] * s, a[1] * s, a[2] * s)


def vec_dot(a: Vec3, b: Vec3) -> float:
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]


def vec_norm(a: Vec3) -> float:
    return math.sqrt(vec_dot(a, a))


def vec_unit(a: Vec3) -> Vec3:
    n = vec_norm(a)
    if n == 0.0:
        raise ValueError("zero-length vector has no direction")
    return (a[0] / n, a[1] / n, a[2] / n)


def distance(a: Vec3, b: Vec3) -> float:
    return vec_norm(vec_sub(a, b))


def yaw_to_column(yaw_deg: float, width: int) -> float:
    """Continuous equirectangular column coordinate for a yaw angle.

    Pixel i covers [i, i+1); its center sits at i + 0.5.
    """
    return (wrap_degrees(yaw_deg) + 180.0) / 360.0 * width


def pitch_to_row(pitch_deg: float, height: int) -> float:
    return (90.0 - pitch_deg) / 180.0 * height


def column_to_yaw(x: float, width: int) -> float:
    return -180.0 + x * 360.0 / width


def row_to_pitch(y: float, height: int) -> float:
    return 90.0 - y * 180.0 / height
