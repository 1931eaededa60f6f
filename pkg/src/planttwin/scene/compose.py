"""Panorama composition and perspective view extraction.

Frames captured by a stationary rotating camera (pitch 0) are reprojected
into an equirectangular panorama about their yaw, feathered linearly by
angular distance to each frame's center. A pluggable backend seam wraps
composition so view-synthesis models can substitute for it; the default
backend is this panorama composer.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from planttwin.errors import (
    BackendUnavailable,
    DuplicateYaw,
    EmptyFrameSet,
    MalformedImage,
    PanoramaInvariantError,
    UncoveredRegion,
)
from planttwin.geometry import normalize_yaw
from planttwin.scene import projection
from planttwin.scene.image import validate_raster

SENTINEL_COLOR = (255, 0, 255)  # uncovered pixels; never produced by blending
MIN_EDGE_WEIGHT = 1e-9  # keeps single-coverage frame edges from dividing by 0

DEFAULT_PANORAMA_HEIGHT = 512


@dataclass(frozen=True)
class SceneFrame:
    camera_id: str
    yaw: float  # degrees in [0, 360)
    pitch: float  # fixed 0 for the rotating rig
    hfov: float  # degrees
    image: np.ndarray  # (h, w, 3) uint8
    captured_at: float

    def __post_init__(self):
        validate_raster(self.image)
        if not 0.0 < self.hfov < 180.0:
            raise MalformedImage(f"hfov must be in (0, 180), got {self.hfov}")
        object.__setattr__(self, "yaw", normalize_yaw(self.yaw))


@dataclass(frozen=True)
class Panorama:
    image: np.ndarray  # (H, 2H, 3) uint8
    coverage: np.ndarray  # (2H,) bool, per column
    composed_at: float
    version: int = 0

    def __post_init__(self):
        validate_raster(self.image)

    @property
    def height(self) -> int:
        return self.image.shape[0]

    @property
    def width(self) -> int:
        return self.image.shape[1]


def validate_panorama(pano: Panorama) -> Panorama:
    if pano.width != 2 * pano.height:
        raise PanoramaInvariantError(
            f"panorama must be 2:1, got {pano.width}x{pano.height}"
        )
    if pano.coverage.shape != (pano.width,):
        raise PanoramaInvariantError("coverage mask must have one entry per column")
    return pano


def blend_weights(
    yaws: list[float], hfovs: list[float], width: int
) -> tuple[np.ndarray, np.ndarray]:
    """Per-frame, per-column normalized blend weights.

    Returns (weights (n, width), covered (width,)). A frame contributes to
    a column iff the column's yaw is within hfov/2 of the frame center;
    its raw weight falls linearly with angular distance. Weights over each
    covered column sum to 1.
    """
    col_yaw = projection.column_yaws(width)
    raw = np.zeros((len(yaws), width))
    for i, (yaw, hfov) in enumerate(zip(yaws, hfovs)):
        delta = np.abs(projection.wrap_degrees(col_yaw - yaw))
        half = hfov / 2.0
        inside = delta <= half
        raw[i, inside] = np.maximum(1.0 - delta[inside] / half, MIN_EDGE_WEIGHT)
    total = raw.sum(axis=0)
    covered = total > 0.0
    weights = np.zeros_like(raw)
    weights[:, covered] = raw[:, covered] / total[covered]
    return weights, covered


def compose_panorama(frames: list[SceneFrame], height: int = DEFAULT_PANORAMA_HEIGHT) -> Panorama:
    """Reproject and feather frames into an equirectangular panorama.

    Pure function of the frame set: frames are processed in a canonical
    order, so permuting the input changes nothing.
    """
    if not frames:
        raise EmptyFrameSet("cannot compose an empty frame set")
    ordered = sorted(frames, key=lambda f: (f.camera_id, f.yaw))
    yaws = [f.yaw for f in ordered]
    if len(set(yaws)) != len(yaws):
        raise DuplicateYaw(f"frame yaws must be distinct, got {sorted(yaws)}")

    width = 2 * height
    weights, covered = blend_weights(yaws, [f.hfov for f in ordered], width)
    pitches = projection.row_pitches(height)

    accum = np.zeros((height, width, 3))
    wsum = np.zeros((height, width))
    col_yaw = projection.column_yaws(width)
    for i, frame in enumerate(ordered):
        cols = np.nonzero(weights[i] > 0.0)[0]
        if cols.size == 0:
            continue
        delta = projection.wrap_degrees(col_yaw[cols] - frame.yaw)
        fh, fw = frame.image.shape[:2]
        xs, ys, valid = projection.frame_lookup(delta, pitches, fw, fh, frame.hfov)
        colors = projection.sample_bilinear(frame.image, xs, ys, wrap_x=False)
        pixel_w = weights[i, cols][None, :] * valid
        accum[:, cols, :] += colors * pixel_w[..., None]
        wsum[:, cols] += pixel_w

    image = np.empty((height, width, 3), dtype=np.uint8)
    image[:] = SENTINEL_COLOR
    lit = wsum > 0.0
    image[lit] = np.clip(np.rint(accum[lit] / wsum[lit, None]), 0, 255).astype(np.uint8)
    composed_at = max(f.captured_at for f in ordered)
    return Panorama(image=image, coverage=covered, composed_at=composed_at)


@dataclass(frozen=True)
class ViewPose:
    yaw: float
    pitch: float  # degrees in [-90, 90]
    vfov: float  # degrees in (0, 180)
    viewport: tuple[int, int]  # (width px, height px)

    def __post_init__(self):
        if not 0.0 < self.vfov < 180.0:
            raise ValueError(f"vfov must be in (0, 180), got {self.vfov}")
        if not -90.0 <= self.pitch <= 90.0:
            raise ValueError(f"pitch must be in [-90, 90], got {self.pitch}")
        w, h = self.viewport
        if w < 1 or h < 1:
            raise ValueError("viewport must be at least 1x1")


def extract_view(pano: Panorama, pose: ViewPose) -> np.ndarray:
    """Perspective raster by spherical lookup with bilinear sampling.

    Raises UncoveredRegion when the window needs data from uncovered
    columns. At the very edge of coverage the horizontal blend clamps to
    the covered side instead of bleeding sentinel pixels in.
    """
    w, h = pose.viewport
    yaw_map, pitch_map = projection.view_directions(pose.yaw, pose.pitch, pose.vfov, w, h)
    xs = (yaw_map + 180.0) / 360.0 * pano.width
    ys = (90.0 - pitch_map) / 180.0 * pano.height

    fx = xs - 0.5
    fy = ys - 0.5
    x0 = np.floor(fx).astype(np.int64)
    y0 = np.floor(fy).astype(np.int64)
    wx = fx - x0
    wy = (fy - y0)[..., None]
    x0 %= pano.width
    x1 = (x0 + 1) % pano.width
    y0 = np.clip(y0, 0, pano.height - 1)
    y1 = np.clip(y0 + 1, 0, pano.height - 1)

    cov_l = pano.coverage[x0]
    cov_r = pano.coverage[x1]
    if not np.all(cov_l | cov_r):
        bad = int(np.count_nonzero(~(cov_l | cov_r)))
        raise UncoveredRegion(
            f"view window touches uncovered panorama columns ({bad} of {cov_l.size} pixels)"
        )
    wx = np.where(~cov_r, 0.0, np.where(~cov_l, 1.0, wx))[..., None]

    img = pano.image.astype(np.float64)
    top = img[y0, x0] * (1.0 - wx) + img[y0, x1] * wx
    bottom = img[y1, x0] * (1.0 - wx) + img[y1, x1] * wx
    colors = top * (1.0 - wy) + bottom * wy
    return np.clip(np.rint(colors), 0, 255).astype(np.uint8)


class PanoramaBackend:
    """Default synthesis backend: classical panorama composition."""

    name = "panorama"

    def compose(self, frames: list[SceneFrame], height: int) -> Panorama:
        return compose_panorama(frames, height)


_BACKENDS: dict[str, type] = {PanoramaBackend.name: PanoramaBackend}


def register_backend(name: str, factory: type) -> None:
    _BACKENDS[name] = factory


def get_backend(name: str):
    try:
        return _BACKENDS[name]()
    except KeyError:
        raise BackendUnavailable(
            f"unknown synthesis backend {name!r}; available: {sorted(_BACKENDS)}"
        ) from None
