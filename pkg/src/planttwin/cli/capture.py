"""Synthetic capture: render the rig's yaw sweep and upload the frames."""
from __future__ import annotations

import json

from planttwin.errors import ServerUnreachable
from planttwin.cli.scenario import Scenario
from planttwin.net.client import TransportError, WireClient
from planttwin.net.multipart import Part, build_multipart
from planttwin.scene.image import encode_ppm
from planttwin.scene.synthetic import render_frame


def render_capture_sweep(scenario: Scenario, captured_at: float = 0.0):
    """One synthetic frame per configured capture yaw."""
    camera = scenario.camera
    w, h = camera.frame_size
    frames = []
    for yaw in camera.capture_yaws:
        metadata = {
            "camera_id": "rig-1",
            "yaw": yaw,
            "pitch": 0.0,
            "hfov": camera.hfov,
            "captured_at": captured_at,
        }
        frames.append((metadata, render_frame(yaw, camera.hfov, w, h)))
    return frames


def upload_frames(client: WireClient, frames) -> int:
    """POST each frame as multipart; returns the final panorama version."""
    version = 0
    for metadata, image in frames:
        content_type, body = build_multipart(
            [
                Part(
                    name="metadata",
                    data=json.dumps(metadata, sort_keys=True).encode("utf-8"),
                    content_type="application/json",
                ),
                Part(
                    name="image",
                    data=encode_ppm(image),
                    filename=f"yaw{int(metadata['yaw']):03d}.ppm",
                    content_type="image/x-portable-pixmap",
                ),
            ]
        )
        try:
            response = client.request(
                "POST", "/v1/frames", body=body, headers={"content-type": content_type}
            )
        except TransportError as exc:
            raise ServerUnreachable(str(exc)) from exc
        if response.status != 200:
            raise ServerUnreachable(
                f"frame upload rejected with {response.status}: {response.body[:200]!r}"
            )
        version = response.json().get("version", version)
    return version
