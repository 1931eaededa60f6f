"""Frame store: latest frame per (camera, yaw), lazily recomposed panorama.

Single writer, snapshot readers: ingest swaps an internal dict under a
lock and bumps the version; composition runs lazily on the next panorama
read and the result is swapped in atomically.
"""
from __future__ import annotations

import threading

from planttwin.errors import NoPanorama
from planttwin.scene.compose import (
    DEFAULT_PANORAMA_HEIGHT,
    Panorama,
    PanoramaBackend,
    SceneFrame,
    validate_panorama,
)


class FrameStore:
    def __init__(self, backend=None, panorama_height: int = DEFAULT_PANORAMA_HEIGHT):
        self.backend = backend if backend is not None else PanoramaBackend()
        self.panorama_height = panorama_height
        self._frames: dict[tuple[str, float], SceneFrame] = {}
        self._version = 0
        self._cached: Panorama | None = None
        self._lock = threading.Lock()

    def ingest(self, frame: SceneFrame) -> int:
        """Store a frame (latest wins per camera+yaw); returns new version."""
        with self._lock:
            self._frames[(frame.camera_id, frame.yaw)] = frame
            self._version += 1
            self._cached = None
            return self._version

    def frames(self) -> list[SceneFrame]:
        with self._lock:
            return list(self._frames.values())

    @property
    def version(self) -> int:
        with self._lock:
            return self._version

    def panorama(self) -> Panorama:
        """Current panorama, recomposing if frames changed since last call."""
        with self._lock:
            if self._cached is not None:
                return self._cached
            frames = list(self._frames.values())
            version = self._version
        if not frames:
            raise NoPanorama("no frames ingested yet")
        pano = self.backend.compose(frames, self.panorama_height)
        pano = validate_panorama(pano)
        pano = Panorama(
            image=pano.image,
            coverage=pano.coverage,
            composed_at=pano.composed_at,
            version=version,
        )
        with self._lock:
            # only publish if no newer frames arrived while composing
            if self._version == version:
                self._cached = pano
        return pano
