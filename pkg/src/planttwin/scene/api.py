"""HTTP surface of the scene pipeline (mounted into the interface server).

  POST /v1/frames            multipart: metadata JSON + image (PPM or PNG)
  GET  /v1/panorama          PPM by default, PNG or JSON metadata by Accept
  GET  /v1/view?yaw=&pitch=&vfov=&w=&h=
"""
from __future__ import annotations

import json

import numpy as np

from planttwin.errors import MalformedImage
from planttwin.net.http import BadRequest, Request, Response, Router, json_response
from planttwin.net.multipart import parse_multipart
from planttwin.scene.compose import SceneFrame, ViewPose, extract_view
from planttwin.scene.image import PNG_MIME, PPM_MIME, decode_image, encode_png, encode_ppm
from planttwin.scene.store import FrameStore


def parse_frame_upload(request: Request) -> SceneFrame:
    content_type = request.header("content-type")
    if not content_type.startswith("multipart/form-data"):
        raise BadRequest("frame upload must be multipart/form-data")
    parts = {p.name: p for p in parse_multipart(content_type, request.body)}
    if "metadata" not in parts or "image" not in parts:
        raise BadRequest("upload needs 'metadata' and 'image' parts")
    try:
        meta = json.loads(parts["metadata"].data.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise BadRequest(f"metadata part is not valid JSON: {exc}") from exc
    image = decode_image(parts["image"].data)
    try:
        return SceneFrame(
            camera_id=str(meta["camera_id"]),
            yaw=float(meta["yaw"]),
            pitch=float(meta.get("pitch", 0.0)),
            hfov=float(meta["hfov"]),
            image=image,
            captured_at=float(meta.get("captured_at", 0.0)),
        )
    except KeyError as exc:
        raise BadRequest(f"metadata missing field {exc}") from exc
    except (TypeError, ValueError) as exc:
        raise BadRequest(f"bad metadata value: {exc}") from exc


def image_response(image: np.ndarray, accept: str, extra_headers: dict | None = None) -> Response:
    if PNG_MIME in accept:
        body, mime = encode_png(image), PNG_MIME
    else:
        body, mime = encode_ppm(image), PPM_MIME
    headers = {"content-type": mime}
    if extra_headers:
        headers.update(extra_headers)
    return Response(status=200, headers=headers, body=body)


def add_scene_routes(router: Router, store: FrameStore, include_view: bool = True) -> None:
    """Mount frame/panorama routes; hosts with their own richer /v1/view
    (the interface server) mount with include_view=False."""
    def upload_frame(request: Request) -> Response:
        frame = parse_frame_upload(request)
        version = store.ingest(frame)
        return json_response({"stored": True, "version": version})

    def get_panorama(request: Request) -> Response:
        accept = request.header("accept", PPM_MIME)
        pano = store.panorama()
        if "application/json" in accept:
            coverage = pano.coverage
            return json_response(
                {
                    "version": pano.version,
                    "width": pano.width,
                    "height": pano.height,
                    "coverage_fraction": float(np.count_nonzero(coverage)) / coverage.size,
                    "composed_at": pano.composed_at,
                }
            )
        return image_response(
            pano.image, accept, {"x-panorama-version": str(pano.version)}
        )

    def get_view(request: Request) -> Response:
        pose = view_pose_from_query(request.query)
        pano = store.panorama()
        raster = extract_view(pano, pose)
        return image_response(
            raster, request.header("accept", PPM_MIME),
            {"x-panorama-version": str(pano.version)},
        )

    router.add("POST", "/v1/frames", upload_frame)
    router.add("GET", "/v1/panorama", get_panorama)
    if include_view:
        router.add("GET", "/v1/view", get_view)


def view_pose_from_query(query: dict[str, str]) -> ViewPose:
    try:
        pose = ViewPose(
            yaw=float(query.get("yaw", "0")),
            pitch=float(query.get("pitch", "0")),
            vfov=float(query.get("vfov", "60")),
            viewport=(int(query.get("w", "640")), int(query.get("h", "480"))),
        )
    except ValueError as exc:
        raise BadRequest(f"bad view parameters: {exc}") from exc
    return pose
