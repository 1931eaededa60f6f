import json

import numpy as np
import pytest

from planttwin.net.client import DirectClient
from planttwin.net.http import Router
from planttwin.net.multipart import Part, build_multipart
from planttwin.scene.api import add_scene_routes
from planttwin.scene.image import decode_png, decode_ppm, encode_png, encode_ppm
from planttwin.scene.store import FrameStore
from planttwin.scene.synthetic import render_frame


@pytest.fixture
def client():
    router = Router()
    store = FrameStore(panorama_height=64)
    add_scene_routes(router, store)
    return DirectClient(router), store


def upload(client, yaw, image_bytes, content_type, hfov=60.0):
    metadata = {"camera_id": "cam-1", "yaw": yaw, "pitch": 0.0, "hfov": hfov,
                "captured_at": 1.0}
    mp_type, body = build_multipart([
        Part(name="metadata", data=json.dumps(metadata).encode(), content_type="application/json"),
        Part(name="image", data=image_bytes, filename="f", content_type=content_type),
    ])
    return client.request("POST", "/v1/frames", body=body, headers={"content-type": mp_type})


class TestFrameUpload:
    def test_ppm_and_png_both_accepted(self, client):
        wire, store = client
        image = render_frame(0.0, 60.0, 32, 32)
        response = upload(wire, 0.0, encode_ppm(image), "image/x-portable-pixmap")
        assert response.status == 200
        assert response.json() == {"stored": True, "version": 1}
        response = upload(wire, 45.0, encode_png(image), "image/png")
        assert response.status == 200
        assert response.json()["version"] == 2
        frames = store.frames()
        assert len(frames) == 2
        # PNG round-trips losslessly for RGB
        assert np.array_equal(frames[0].image, frames[1].image)

    def test_same_yaw_replaces(self, client):
        wire, store = client
        image = render_frame(0.0, 60.0, 16, 16)
        upload(wire, 45.0, encode_ppm(image), "image/x-portable-pixmap")
        upload(wire, 45.0, encode_ppm(image), "image/x-portable-pixmap")
        assert len(store.frames()) == 1
        assert store.version == 2

    def test_garbage_image_rejected_422(self, client):
        wire, _ = client
        response = upload(wire, 0.0, b"albatross", "image/png")
        assert response.status == 422
        assert response.json()["error"]["code"] == "MalformedImage"

    def test_missing_metadata_part_rejected_400(self, client):
        wire, _ = client
        mp_type, body = build_multipart([Part(name="image", data=b"P6\n1 1\n255\n000")])
        response = wire.request("POST", "/v1/frames", body=body,
                                headers={"content-type": mp_type})
        assert response.status == 400

    def test_bad_hfov_rejected(self, client):
        wire, _ = client
        image = encode_ppm(render_frame(0.0, 60.0, 16, 16))
        response = upload(wire, 0.0, image, "image/x-portable-pixmap", hfov=200.0)
        assert response.status == 422


class TestPanoramaEndpoint:
    def seed(self, wire):
        for yaw in range(0, 360, 45):
            image = encode_ppm(render_frame(float(yaw), 60.0, 32, 32))
            upload(wire, float(yaw), image, "image/x-portable-pixmap")

    def test_404_before_any_frames(self, client):
        wire, _ = client
        response = wire.request("GET", "/v1/panorama")
        assert response.status == 404
        assert response.json()["error"]["code"] == "NoPanorama"

    def test_ppm_default_png_by_accept(self, client):
        wire, _ = client
        self.seed(wire)
        ppm = wire.request("GET", "/v1/panorama")
        assert ppm.status == 200
        assert ppm.headers["content-type"] == "image/x-portable-pixmap"
        assert ppm.headers["x-panorama-version"] == "8"
        decoded = decode_ppm(ppm.body)
        assert decoded.shape == (64, 128, 3)
        png = wire.request("GET", "/v1/panorama", headers={"accept": "image/png"})
        assert png.headers["content-type"] == "image/png"
        assert np.array_equal(decode_png(png.body), decoded)

    def test_json_metadata(self, client):
        wire, _ = client
        self.seed(wire)
        meta = wire.request("GET", "/v1/panorama", headers={"accept": "application/json"}).json()
        assert meta["version"] == 8
        assert meta["width"] == 128 and meta["height"] == 64
        assert meta["coverage_fraction"] == 1.0

    def test_view_route_served_from_store(self, client):
        wire, _ = client
        self.seed(wire)
        view = wire.request(
            "GET", "/v1/view", query={"yaw": "90", "vfov": "50", "w": "24", "h": "24"}
        )
        assert view.status == 200
        assert decode_ppm(view.body).shape == (24, 24, 3)

    def test_uncovered_view_422(self, client):
        wire, _ = client
        image = encode_ppm(render_frame(0.0, 60.0, 32, 32))
        upload(wire, 0.0, image, "image/x-portable-pixmap")
        response = wire.request(
            "GET", "/v1/view", query={"yaw": "180", "vfov": "50", "w": "24", "h": "24"}
        )
        assert response.status == 422
        assert response.json()["error"]["code"] == "UncoveredRegion"
