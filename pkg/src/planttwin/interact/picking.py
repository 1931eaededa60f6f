"""FPS-style selection: view ray construction and slab-test box picking."""
from __future__ import annotations

import math
from dataclasses import dataclass

from planttwin.geometry import Vec3, camera_basis, vec_unit
from planttwin.interact.objects import InteractableObject
from planttwin.scene.compose import ViewPose

_PARALLEL_EPS = 1e-12


@dataclass(frozen=True)
class Ray:
    origin: Vec3
    direction: Vec3  # unit length


def ray_from_view(camera_pos: Vec3, pose: ViewPose, screen_point: tuple[float, float]) -> Ray:
    """Ray through a viewport point; (0.5, 0.5) is the screen center.

    u runs left to right, v top to bottom, both in [0, 1].
    """
    u, v = screen_point
    if not (0.0 <= u <= 1.0 and 0.0 <= v <= 1.0):
        raise ValueError(f"screen point must be in [0,1]^2, got {screen_point}")
    w, h = pose.viewport
    tan_v = math.tan(math.radians(pose.vfov) / 2.0)
    tan_h = tan_v * w / h
    forward, right, up = camera_basis(pose.yaw, pose.pitch)
    x = (2.0 * u - 1.0) * tan_h
    y = (1.0 - 2.0 * v) * tan_v
    direction = (
        forward[0] + x * right[0] + y * up[0],
        forward[1] + x * right[1] + y * up[1],
        forward[2] + x * right[2] + y * up[2],
    )
    return Ray(origin=camera_pos, direction=vec_unit(direction))


def intersect_box(ray: Ray, bounds: tuple[Vec3, Vec3]) -> float | None:
    """Smallest t >= 0 where the ray enters the box, or None.

    Origin inside (boundary inclusive) returns 0. Assumes unit direction.
    """
    lo, hi = bounds
    t_near = -math.inf
    t_far = math.inf
    for axis in range(3):
        o = ray.origin[axis]
        d = ray.direction[axis]
        if abs(d) < _PARALLEL_EPS:
            if o < lo[axis] or o > hi[axis]:
                return None
            continue
        t1 = (lo[axis] - o) / d
        t2 = (hi[axis] - o) / d
        if t1 > t2:
            t1, t2 = t2, t1
        t_near = max(t_near, t1)
        t_far = min(t_far, t2)
        if t_near > t_far:
            return None
    if t_far < 0.0:
        return None
    return t_near if t_near > 0.0 else 0.0


def pick(ray: Ray, objects: list[InteractableObject]) -> str | None:
    """Nearest hit object id; equal-t ties go to the smaller id."""
    best: tuple[float, str] | None = None
    for obj in objects:
        t = intersect_box(ray, obj.bounds)
        if t is None:
            continue
        key = (t, obj.id)
        if best is None or key < best:
            best = key
    return best[1] if best is not None else None
