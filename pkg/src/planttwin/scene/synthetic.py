"""Procedurally textured cylinder scene for synthetic captures.

Stands in for the camera hardware: `render_frame` produces what a pinhole
camera at the rig position would see inside a cylinder wrapped in a
smooth procedural texture. Smoothness matters: golden round-trip tests
compare composed panoramas against these frames, so the texture must be
band-limited enough to survive two resamplings.
"""
from __future__ import annotations

import numpy as np

from planttwin.scene import projection

CYLINDER_RADIUS = 2.0  # meters from the rig to the textured wall
HEIGHT_SCALE = 2.0  # vertical extent compressed through tanh


def texture_colors(yaw_deg: np.ndarray, pitch_deg: np.ndarray) -> np.ndarray:
    """RGB in [0, 255] for view directions hitting the cylinder wall."""
    a = np.radians(yaw_deg)
    # wall-hit height above the rig, squashed so the poles stay smooth
    theta = np.radians(np.clip(pitch_deg, -89.999, 89.999))
    u = np.tanh(CYLINDER_RADIUS * np.tan(theta) / HEIGHT_SCALE)
    r = 0.55 + 0.25 * np.sin(3.0 * a) + 0.15 * u
    g = 0.50 + 0.20 * np.sin(2.0 * a + 1.7) - 0.18 * u
    b = 0.55 + 0.25 * np.cos(a + 0.6) + 0.10 * np.sin(2.0 * u)
    rgb = np.stack([r, g, b], axis=-1)
    return np.clip(rgb * 255.0, 0.0, 255.0)


def render_frame(
    yaw_deg: float,
    hfov_deg: float,
    width: int = 256,
    height: int = 256,
    pitch_deg: float = 0.0,
) -> np.ndarray:
    """Render one synthetic capture as a uint8 (height, width, 3) raster."""
    vfov = 2.0 * np.degrees(
        np.arctan(np.tan(np.radians(hfov_deg) / 2.0) * height / width)
    )
    yaw_map, pitch_map = projection.view_directions(
        yaw_deg, pitch_deg, float(vfov), width, height
    )
    return np.rint(texture_colors(yaw_map, pitch_map)).astype(np.uint8)


def render_panorama_reference(height: int) -> np.ndarray:
    """Ideal panorama of the texture, bypassing frame capture entirely."""
    yaw = projection.column_yaws(2 * height)[None, :]
    pitch = projection.row_pitches(height)[:, None]
    yaw_grid = np.broadcast_to(yaw, (height, 2 * height))
    pitch_grid = np.broadcast_to(pitch, (height, 2 * height))
    return np.rint(texture_colors(yaw_grid, pitch_grid)).astype(np.uint8)
