"""Vectorized pinhole <-> equirectangular projection.

Follows the package-wide convention (see planttwin.geometry): yaw CCW
about +z with 0 at +x, pitch positive up, panorama column 0 at yaw -180,
row 0 at pitch +90, pixel centers at index + 0.5.
"""
from __future__ import annotations

import math

import numpy as np


def column_yaws(width: int) -> np.ndarray:
    return (np.arange(width) + 0.5) / width * 360.0 - 180.0


def row_pitches(height: int) -> np.ndarray:
    return 90.0 - (np.arange(height) + 0.5) / height * 180.0


def wrap_degrees(angles: np.ndarray) -> np.ndarray:
    """Wrap into (-180, 180], elementwise."""
    wrapped = np.mod(angles, 360.0)
    return np.where(wrapped > 180.0, wrapped - 360.0, wrapped)


def half_fov_tangents(hfov_deg: float, width: int, height: int) -> tuple[float, float]:
    """(tan(hfov/2), tan(vfov/2)) for a pinhole with square pixels."""
    tan_h = math.tan(math.radians(hfov_deg) / 2.0)
    return tan_h, tan_h * height / width


def frame_lookup(
    delta_yaw_deg: np.ndarray,
    pitch_deg: np.ndarray,
    frame_w: int,
    frame_h: int,
    hfov_deg: float,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Map sphere directions into continuous frame pixel coordinates.

    delta_yaw_deg: (W',) yaw offsets from the frame center.
    pitch_deg: (H,) pitches.
    Returns (xs, ys, valid), each (H, W'). Coordinates live in [0, frame_w]
    x [0, frame_h] with pixel centers at index + 0.5.
    """
    tan_h, tan_v = half_fov_tangents(hfov_deg, frame_w, frame_h)
    dpsi = np.radians(delta_yaw_deg)[None, :]
    theta = np.radians(pitch_deg)[:, None]
    cos_t = np.cos(theta)
    forward = cos_t * np.cos(dpsi)
    right = -cos_t * np.sin(dpsi)
    up = np.broadcast_to(np.sin(theta), forward.shape)
    with np.errstate(divide="ignore", invalid="ignore"):
        u_norm = np.where(forward > 0, right / forward, np.inf)
        v_norm = np.where(forward > 0, up / forward, np.inf)
    valid = (forward > 0) & (np.abs(u_norm) <= tan_h) & (np.abs(v_norm) <= tan_v)
    xs = (u_norm + tan_h) / (2.0 * tan_h) * frame_w
    ys = (tan_v - v_norm) / (2.0 * tan_v) * frame_h
    return xs, ys, valid


def view_directions(
    yaw_deg: float, pitch_deg: float, vfov_deg: float, width: int, height: int
) -> tuple[np.ndarray, np.ndarray]:
    """Per-pixel (yaw, pitch) in degrees for a perspective viewport."""
    tan_v = math.tan(math.radians(vfov_deg) / 2.0)
    tan_h = tan_v * width / height
    u_norm = ((np.arange(width) + 0.5) / width * 2.0 - 1.0) * tan_h
    v_norm = (1.0 - (np.arange(height) + 0.5) / height * 2.0) * tan_v
    psi = math.radians(yaw_deg)
    theta = math.radians(pitch_deg)
    forward = np.array(
        [math.cos(theta) * math.cos(psi), math.cos(theta) * math.sin(psi), math.sin(theta)]
    )
    right = np.array([math.sin(psi), -math.cos(psi), 0.0])
    up = np.array(
        [-math.sin(theta) * math.cos(psi), -math.sin(theta) * math.sin(psi), math.cos(theta)]
    )
    d = (
        forward[None, None, :]
        + u_norm[None, :, None] * right[None, None, :]
        + v_norm[:, None, None] * up[None, None, :]
    )
    yaw_out = np.degrees(np.arctan2(d[..., 1], d[..., 0]))
    pitch_out = np.degrees(np.arctan2(d[..., 2], np.hypot(d[..., 0], d[..., 1])))
    return yaw_out, pitch_out


def sample_bilinear(
    image: np.ndarray, xs: np.ndarray, ys: np.ndarray, wrap_x: bool
) -> np.ndarray:
    """Bilinear sample at continuous coords (pixel centers at index + 0.5).

    wrap_x=True wraps horizontally (panorama yaw seam); otherwise clamps.
    Vertical access always clamps.
    """
    h, w = image.shape[:2]
    fx = xs - 0.5
    fy = ys - 0.5
    x0 = np.floor(fx).astype(np.int64)
    y0 = np.floor(fy).astype(np.int64)
    wx = (fx - x0)[..., None]
    wy = (fy - y0)[..., None]
    x1 = x0 + 1
    y1 = y0 + 1
    if wrap_x:
        x0 %= w
        x1 %= w
    else:
        x0 = np.clip(x0, 0, w - 1)
        x1 = np.clip(x1, 0, w - 1)
    y0 = np.clip(y0, 0, h - 1)
    y1 = np.clip(y1, 0, h - 1)
    img = image.astype(np.float64)
    top = img[y0, x0] * (1.0 - wx) + img[y0, x1] * wx
    bottom = img[y1, x0] * (1.0 - wx) + img[y1, x1] * wx
    return top * (1.0 - wy) + bottom * wy
