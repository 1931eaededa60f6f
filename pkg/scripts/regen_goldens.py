#!/usr/bin/env python3
"""Regenerate the PPM golden fixtures under tests/golden/.

Run from the repo root after any deliberate change to the synthetic
texture or composition math, then review the image diffs before
committing. Golden tests compare against these files bit for bit.
"""
from __future__ import annotations

import pathlib

from planttwin.scene.compose import SceneFrame, compose_panorama
from planttwin.scene.image import encode_ppm
from planttwin.scene.synthetic import render_frame

GOLDEN_DIR = pathlib.Path(__file__).resolve().parent.parent / "tests" / "golden"

FRAME_SIZE = 160
PANO_HEIGHT = 160
HFOV = 60.0
YAWS = list(range(0, 360, 45))


def main() -> None:
    GOLDEN_DIR.mkdir(parents=True, exist_ok=True)
    frames = [
        SceneFrame("cam-1", float(yaw), 0.0, HFOV,
                   render_frame(float(yaw), HFOV, FRAME_SIZE, FRAME_SIZE), 0.0)
        for yaw in YAWS
    ]
    frame_path = GOLDEN_DIR / "frame_yaw000.ppm"
    frame_path.write_bytes(encode_ppm(frames[0].image))
    print(f"wrote {frame_path}")

    pano = compose_panorama(frames, height=PANO_HEIGHT)
    pano_path = GOLDEN_DIR / "pano_8x45_h160.ppm"
    pano_path.write_bytes(encode_ppm(pano.image))
    print(f"wrote {pano_path}")


if __name__ == "__main__":
    main()
