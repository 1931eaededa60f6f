"""Screen-space projection of object boxes for console overlays.

The server owns the one projection implementation; view responses include
each object's projected corners so clients never re-derive geometry.
"""
from __future__ import annotations

import math

from planttwin.geometry import Vec3, camera_basis, vec_dot, vec_sub
from planttwin.interact.objects import InteractableObject
from planttwin.scene.compose import ViewPose


def project_point(
    camera_pos: Vec3, pose: ViewPose, point: Vec3
) -> tuple[float, float, bool]:
    """(x_px, y_px, in_front) for a world point in the current viewport."""
    w, h = pose.viewport
    tan_v = math.tan(math.radians(pose.vfov) / 2.0)
    tan_h = tan_v * w / h
    forward, right, up = camera_basis(pose.yaw, pose.pitch)
    d = vec_sub(point, camera_pos)
    depth = vec_dot(forward, d)
    if depth <= 1e-9:
        return 0.0, 0.0, False
    u_norm = vec_dot(right, d) / depth
    v_norm = vec_dot(up, d) / depth
    x_px = (u_norm / tan_h + 1.0) / 2.0 * w
    y_px = (1.0 - v_norm / tan_v) / 2.0 * h
    return x_px, y_px, True


def object_overlay(
    camera_pos: Vec3, pose: ViewPose, obj: InteractableObject
) -> dict:
    """Overlay entry: projected corners plus a clipped screen bbox."""
    w, h = pose.viewport
    corners = []
    xs, ys = [], []
    for corner in obj.corners():
        x, y, in_front = project_point(camera_pos, pose, corner)
        corners.append({"x": x, "y": y, "in_front": in_front})
        if in_front:
            xs.append(x)
            ys.append(y)
    visible = bool(xs) and min(xs) < w and max(xs) > 0 and min(ys) < h and max(ys) > 0
    bbox = None
    if visible:
        bbox = [
            max(0.0, min(xs)),
            max(0.0, min(ys)),
            min(float(w), max(xs)),
            min(float(h), max(ys)),
        ]
    return {
        "id": obj.id,
        "label": obj.label,
        "visible": visible,
        "corners": corners,
        "bbox": bbox,
    }
