import pathlib

import numpy as np
import pytest

from planttwin.errors import (
    BackendUnavailable,
    DuplicateYaw,
    EmptyFrameSet,
    MalformedImage,
    NoPanorama,
    PanoramaInvariantError,
    UncoveredRegion,
)
from planttwin.scene.compose import (
    Panorama,
    PanoramaBackend,
    SceneFrame,
    ViewPose,
    blend_weights,
    compose_panorama,
    extract_view,
    get_backend,
    validate_panorama,
)
from planttwin.scene.image import decode_ppm, encode_ppm
from planttwin.scene.store import FrameStore
from planttwin.scene.synthetic import render_frame

GOLDEN = pathlib.Path(__file__).parent / "golden"


def synthetic_frames(size=160, hfov=60.0, yaws=range(0, 360, 45)):
    return [
        SceneFrame("cam-1", float(yaw), 0.0, hfov, render_frame(float(yaw), hfov, size, size), 0.0)
        for yaw in yaws
    ]


def flat_frames(color, size=64, hfov=60.0):
    image = np.full((size, size, 3), color, dtype=np.uint8)
    return [SceneFrame("cam-1", float(yaw), 0.0, hfov, image, 0.0) for yaw in range(0, 360, 45)]


class TestComposePanorama:
    def test_eight_frames_cover_every_column(self):
        pano = compose_panorama(synthetic_frames(size=64), height=64)
        assert pano.coverage.all()
        assert pano.width == 2 * pano.height

    def test_constant_color_survives_blending_exactly(self):
        pano = compose_panorama(flat_frames((10, 200, 30)), height=64)
        covered = pano.image[:, pano.coverage]
        # rows near the poles sit outside the frames' vertical footprint
        lit = ~np.all(covered == (255, 0, 255), axis=-1)
        assert lit.any()
        assert np.array_equal(
            np.unique(covered[lit].reshape(-1, 3), axis=0), [[10, 200, 30]]
        )

    def test_single_frame_coverage_matches_hfov_bounds(self):
        pano = compose_panorama(synthetic_frames(size=64, yaws=[0]), height=128)
        width = pano.width
        col_span = 360.0 / width
        yaws = (np.arange(width) + 0.5) / width * 360.0 - 180.0
        covered_yaws = yaws[pano.coverage]
        assert covered_yaws.min() == pytest.approx(-30.0, abs=col_span)
        assert covered_yaws.max() == pytest.approx(30.0, abs=col_span)
        assert not pano.coverage[0]  # yaw -180 edge definitely uncovered

    def test_order_invariance_is_bit_exact(self):
        frames = synthetic_frames(size=64)
        a = compose_panorama(frames, height=64)
        b = compose_panorama(frames[::-1], height=64)
        assert np.array_equal(a.image, b.image)
        assert np.array_equal(a.coverage, b.coverage)

    def test_empty_and_duplicate_yaws_rejected(self):
        with pytest.raises(EmptyFrameSet):
            compose_panorama([], height=64)
        frames = synthetic_frames(size=64, yaws=[0, 360])  # 360 normalizes to 0
        with pytest.raises(DuplicateYaw):
            compose_panorama(frames, height=64)

    def test_blend_weights_sum_to_one_on_covered_columns(self):
        weights, covered = blend_weights(
            [float(y) for y in range(0, 360, 45)], [60.0] * 8, 512
        )
        sums = weights.sum(axis=0)
        assert np.allclose(sums[covered], 1.0, atol=1e-12)
        assert np.all(sums[~covered] == 0.0)
        assert np.all(weights >= 0.0)


class TestGoldens:
    def test_synthetic_frame_matches_golden_bit_for_bit(self):
        golden = decode_ppm((GOLDEN / "frame_yaw000.ppm").read_bytes())
        assert np.array_equal(render_frame(0.0, 60.0, 160, 160), golden)

    def test_composed_panorama_matches_golden_bit_for_bit(self):
        golden = decode_ppm((GOLDEN / "pano_8x45_h160.ppm").read_bytes())
        pano = compose_panorama(synthetic_frames(), height=160)
        assert np.array_equal(pano.image, golden)

    def test_single_frame_round_trip_against_golden(self):
        golden = decode_ppm((GOLDEN / "frame_yaw000.ppm").read_bytes())
        frame = SceneFrame("cam-1", 0.0, 0.0, 60.0, golden, 0.0)
        pano = compose_panorama([frame], height=160)
        out = extract_view(pano, ViewPose(0.0, 0.0, 60.0, (160, 160)))
        mae = np.abs(out.astype(np.float64) - golden.astype(np.float64)).mean()
        assert mae < 3.0  # < 3/255 in unit scale


@pytest.fixture(scope="module")
def pano():
    return compose_panorama(synthetic_frames(), height=160)


class TestExtractView:
    def test_center_pixel_matches_panorama_sample(self, pano):
        out = extract_view(pano, ViewPose(0.0, 0.0, 60.0, (161, 161)))
        center = out[80, 80].astype(int)
        # panorama pixels around direction (0, 0)
        x = int(180.0 / 360.0 * pano.width)
        y = int(90.0 / 180.0 * pano.height)
        neighborhood = pano.image[y - 1 : y + 1, x - 1 : x + 1].reshape(-1, 3).astype(int)
        lo = neighborhood.min(axis=0) - 1
        hi = neighborhood.max(axis=0) + 1
        assert np.all(center >= lo) and np.all(center <= hi)

    def test_yaw_periodicity_is_exact(self, pano):
        a = extract_view(pano, ViewPose(123.0, -10.0, 45.0, (64, 48)))
        b = extract_view(pano, ViewPose(123.0 + 360.0, -10.0, 45.0, (64, 48)))
        assert np.array_equal(a, b)

    def test_locality_outside_frustum_pixels_do_not_matter(self, pano):
        pose = ViewPose(0.0, 0.0, 40.0, (64, 64))
        baseline = extract_view(pano, pose)
        # trash everything well outside the frustum footprint (beyond +-40 deg yaw)
        noisy = pano.image.copy()
        yaws = (np.arange(pano.width) + 0.5) / pano.width * 360.0 - 180.0
        far = np.abs(yaws) > 40.0
        rng = np.random.default_rng(5)
        noisy[:, far] = rng.integers(0, 256, size=(pano.height, far.sum(), 3))
        trashed = Panorama(noisy, pano.coverage, pano.composed_at)
        assert np.array_equal(extract_view(trashed, pose), baseline)

    def test_uncovered_window_rejected(self):
        pano = compose_panorama(synthetic_frames(size=64, yaws=[0]), height=64)
        with pytest.raises(UncoveredRegion):
            extract_view(pano, ViewPose(180.0, 0.0, 60.0, (32, 32)))

    def test_pose_validation(self):
        with pytest.raises(ValueError):
            ViewPose(0.0, 91.0, 60.0, (32, 32))
        with pytest.raises(ValueError):
            ViewPose(0.0, 0.0, 200.0, (32, 32))


class TestBackendSeam:
    def test_default_backend_delegates_to_compose(self):
        frames = synthetic_frames(size=64)
        via_backend = get_backend("panorama").compose(frames, 64)
        direct = compose_panorama(frames, 64)
        assert np.array_equal(via_backend.image, direct.image)

    def test_unknown_backend_unavailable(self):
        with pytest.raises(BackendUnavailable):
            get_backend("nerf-deluxe")

    def test_backend_output_invariant_enforced(self):
        class BrokenBackend:
            def compose(self, frames, height):
                image = np.zeros((height, height, 3), dtype=np.uint8)  # not 2:1
                return Panorama(image, np.zeros(height, dtype=bool), 0.0)

        store = FrameStore(backend=BrokenBackend(), panorama_height=32)
        store.ingest(synthetic_frames(size=16, yaws=[0])[0])
        with pytest.raises(PanoramaInvariantError):
            store.panorama()


class TestFrameStore:
    def test_latest_wins_per_camera_and_yaw(self):
        store = FrameStore(panorama_height=32)
        first = synthetic_frames(size=16, yaws=[45])[0]
        brighter = SceneFrame(
            "cam-1", 45.0, 0.0, 60.0, np.full((16, 16, 3), 200, dtype=np.uint8), 1.0
        )
        store.ingest(first)
        version = store.ingest(brighter)
        assert version == 2
        assert len(store.frames()) == 1
        assert store.frames()[0].captured_at == 1.0

    def test_all_eight_yaws_feed_next_panorama(self):
        store = FrameStore(panorama_height=64)
        for frame in synthetic_frames(size=32):
            store.ingest(frame)
        pano = store.panorama()
        assert pano.coverage.all()
        assert pano.version == 8

    def test_no_frames_is_an_error(self):
        with pytest.raises(NoPanorama):
            FrameStore().panorama()

    def test_zero_dimension_image_rejected(self):
        with pytest.raises(MalformedImage):
            SceneFrame("cam-1", 0.0, 0.0, 60.0, np.zeros((0, 4, 3), dtype=np.uint8), 0.0)

    def test_panorama_cached_until_new_frame(self):
        store = FrameStore(panorama_height=32)
        for frame in synthetic_frames(size=16):
            store.ingest(frame)
        first = store.panorama()
        assert store.panorama() is first
        store.ingest(synthetic_frames(size=16, yaws=[10])[0])
        assert store.panorama() is not first


class TestPpmCodec:
    def test_round_trip_bit_exact(self):
        rng = np.random.default_rng(0)
        image = rng.integers(0, 256, size=(7, 5, 3), dtype=np.uint8)
        assert np.array_equal(decode_ppm(encode_ppm(image)), image)

    def test_header_with_comment(self):
        image = np.arange(12, dtype=np.uint8).reshape(2, 2, 3)
        data = b"P6\n# a comment\n2 2\n255\n" + image.tobytes()
        assert np.array_equal(decode_ppm(data), image)

    def test_truncated_payload_rejected(self):
        with pytest.raises(MalformedImage):
            decode_ppm(b"P6\n4 4\n255\n\x00\x00")


def test_equirect_mapping_inverse_identity():
    # direction -> pixel -> direction, away from the poles
    from planttwin.geometry import (
        column_to_yaw,
        direction_from_angles,
        angles_from_direction,
        pitch_to_row,
        row_to_pitch,
        yaw_to_column,
    )

    rng = np.random.default_rng(9)
    for _ in range(500):
        yaw = float(rng.uniform(-180.0, 180.0))
        pitch = float(rng.uniform(-85.0, 85.0))
        x = yaw_to_column(yaw, 1024)
        y = pitch_to_row(pitch, 512)
        back_yaw, back_pitch = column_to_yaw(x, 1024), row_to_pitch(y, 512)
        d1 = direction_from_angles(yaw, pitch)
        d2 = direction_from_angles(back_yaw, back_pitch)
        angle = np.arccos(np.clip(np.dot(d1, d2), -1.0, 1.0))
        assert angle < 1e-6
        # and the raster cannot tell them apart either
        y2, p2 = angles_from_direction(d1)
        assert yaw_to_column(y2, 1024) == pytest.approx(x, abs=1e-9)
        assert pitch_to_row(p2, 512) == pytest.approx(y, abs=1e-9)
