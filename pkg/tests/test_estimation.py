import numpy as np
import pytest
from helpers import chord_angle_deg, field_error_deg

from graypixel import (
    ChromaVector,
    DegenerateEstimateError,
    IlluminantField,
    LinearImage,
    MultiParams,
    SceneConfig,
    compute_gi,
    correct_image,
    estimate_global,
    estimate_spatial,
    rank_gray,
    render_config,
)
from graypixel.estimation import _kmeans


def image_of(rows):
    return LinearImage(np.asarray(rows, dtype=np.float64))


class TestEstimateGlobal:
    def test_achromatic_mean(self):
        img = image_of([[[0.2, 0.2, 0.2], [0.4, 0.4, 0.4]]])
        est = estimate_global(img, np.array([[0, 0], [0, 1]]))
        assert np.allclose(est.as_array(), 1 / np.sqrt(3), atol=1e-15)

    def test_single_coordinate(self):
        img = image_of([[[0.6, 0.3, 0.2]]])
        est = estimate_global(img, np.array([[0, 0]]))
        assert np.allclose(est.as_array(), np.array([0.6, 0.3, 0.2]) / 0.7, atol=1e-15)

    def test_degenerate_black_selection(self):
        img = image_of([[[0.0, 0.0, 0.0], [0.5, 0.5, 0.5]]])
        with pytest.raises(DegenerateEstimateError, match="degenerate estimate"):
            estimate_global(img, np.array([[0, 0]]))

    def test_bounds_checked(self):
        img = image_of([[[0.5, 0.5, 0.5]]])
        with pytest.raises(ValueError):
            estimate_global(img, np.array([[0, 1]]))
        with pytest.raises(ValueError):
            estimate_global(img, np.empty((0, 2), dtype=int))

    def test_scale_invariance(self):
        rng = np.random.default_rng(2)
        img = LinearImage(rng.uniform(0.1, 0.5, (16, 16, 3)))
        coords = np.argwhere(rng.random((16, 16)) < 0.3)
        a = estimate_global(img, coords).as_array()
        b = estimate_global(img.scaled(1.7), coords).as_array()
        assert np.abs(a - b).max() < 1e-12

    def test_end_to_end_recovery(self):
        cfg = SceneConfig(kind="gray-shading", width=128, height=128, seed=5,
                          illuminant=(0.3, 0.6, 0.74))
        img, _ = render_config(cfg)
        coords = rank_gray(compute_gi(img), 0.1)
        est = estimate_global(img, coords)
        gt = ChromaVector.from_rgb(0.3, 0.6, 0.74)
        assert chord_angle_deg(est.as_array(), gt.as_array()) < 0.5


class TestKMeans:
    def test_separates_two_blobs(self):
        rng = np.random.default_rng(0)
        pts = np.vstack([rng.normal(0, 1, (50, 2)), rng.normal(20, 1, (50, 2))])
        centers, labels = _kmeans(pts, 2, seed=1, max_iters=100)
        assert centers.shape == (2, 2)
        assert len(set(labels[:50])) == 1 and len(set(labels[50:])) == 1
        assert labels[0] != labels[-1]

    def test_deterministic(self):
        rng = np.random.default_rng(3)
        pts = rng.random((200, 2)) * 100
        a = _kmeans(pts, 4, seed=9, max_iters=100)
        b = _kmeans(pts, 4, seed=9, max_iters=100)
        assert np.array_equal(a[0], b[0]) and np.array_equal(a[1], b[1])

    def test_degenerate_points_drop_clusters(self):
        pts = np.zeros((10, 2))
        centers, labels = _kmeans(pts, 3, seed=0, max_iters=10)
        assert centers.shape[0] == 1
        assert (labels == 0).all()


def field_fixture(seed=0, sep=(6.0, 10.0), size=(384, 96), sigma=1.0):
    rng = np.random.default_rng(100 + seed)
    from helpers import paired_chroma

    la, lb = paired_chroma(rng, *sep)
    cfg = SceneConfig(kind="gray-two-illum", width=size[0], height=size[1],
                      seed=seed, illuminant=la, illuminant_b=lb)
    img, gt_field = render_config(cfg)
    params = MultiParams(top_percent=100.0, clusters=2, sigma=sigma, seed=7)
    return img, gt_field, params


class TestEstimateSpatial:
    def test_single_cluster_matches_global(self):
        cfg = SceneConfig(kind="gray-shading", width=64, height=64, seed=4)
        img, _ = render_config(cfg)
        gimap = compute_gi(img)
        params = MultiParams(top_percent=10.0, clusters=1, seed=0)
        field = estimate_spatial(img, gimap, params)
        chroma = estimate_global(img, rank_gray(gimap, 10.0))
        assert np.allclose(field.data, chroma.as_array(), atol=1e-12)
        # constant field: every pixel identical
        assert np.abs(field.data - field.data[0, 0]).max() == 0.0

    def test_common_chroma_gives_constant_field(self):
        cfg = SceneConfig(kind="gray-shading", width=64, height=64, seed=6,
                          illuminant=(0.3, 0.6, 0.74))
        img, _ = render_config(cfg)
        gimap = compute_gi(img)
        gt = ChromaVector.from_rgb(0.3, 0.6, 0.74).as_array()
        for m in (1, 2, 4):
            field = estimate_spatial(img, gimap, MultiParams(
                top_percent=10.0, clusters=m, sigma=5.0, seed=3))
            assert field_error_deg(field.data, np.broadcast_to(
                gt, field.data.shape)).max() < 1e-5

    def test_two_illuminant_recovery(self):
        img, gt_field, params = field_fixture(seed=1)
        field = estimate_spatial(img, compute_gi(img), params)
        err = field_error_deg(field.data, gt_field.data)
        xx = np.arange(img.width)[None, :].repeat(img.height, axis=0)
        far = np.abs(xx + 0.5 - img.width / 2) >= 3 * params.sigma
        assert err[far].max() < 1.0
        assert err.mean() < 3.0

    def test_weights_sum_to_one_and_unit_norm(self):
        img, _, params = field_fixture(seed=2)
        field = estimate_spatial(img, compute_gi(img), params)
        norms = np.linalg.norm(field.data, axis=2)
        assert np.abs(norms - 1.0).max() < 1e-12

    def test_byte_identical_across_runs(self):
        img, _, params = field_fixture(seed=3)
        gimap = compute_gi(img)
        blobs = {estimate_spatial(img, gimap, params).data.tobytes() for _ in range(5)}
        assert len(blobs) == 1

    def test_squared_distance_variant_differs(self):
        img, _, params = field_fixture(seed=4)
        gimap = compute_gi(img)
        a = estimate_spatial(img, gimap, params)
        b = estimate_spatial(img, gimap, MultiParams(
            top_percent=100.0, clusters=2, sigma=params.sigma, seed=7,
            squared_distance=True))
        assert not np.array_equal(a.data, b.data)

    def test_param_validation(self):
        with pytest.raises(ValueError):
            MultiParams(clusters=0)
        with pytest.raises(ValueError):
            MultiParams(sigma=-1.0)


class TestCorrectImage:
    def test_neutral_illuminant_is_identity(self):
        rng = np.random.default_rng(8)
        img = LinearImage(rng.uniform(0, 0.9, (8, 8, 3)))
        out = correct_image(img, ChromaVector.from_rgb(1, 1, 1))
        assert np.allclose(out.data, img.data, atol=1e-15)

    def test_gray_pixel_becomes_achromatic(self):
        img = image_of([[[0.3, 0.6, 0.74]]])
        est = ChromaVector.from_rgb(0.3, 0.6, 0.74)
        out = correct_image(img, est)
        assert np.allclose(out.data[0, 0], 0.6, atol=1e-12)

    def test_clipping(self):
        img = image_of([[[0.9, 0.5, 0.5]]])
        est = ChromaVector.from_rgb(0.3, 0.6, 0.6)
        out = correct_image(img, est)
        assert out.data[0, 0, 0] == 1.0  # 0.9 * (0.6/0.3) = 1.8, clipped
        assert np.allclose(out.data[0, 0, 1:], 0.5)

    def test_zero_component_rejected(self):
        img = image_of([[[0.5, 0.5, 0.5]]])
        with pytest.raises(DegenerateEstimateError, match="degenerate illuminant"):
            correct_image(img, ChromaVector.from_rgb(0.0, 0.8, 0.6))

    def test_field_correction_shape_checked(self):
        img = image_of([[[0.5, 0.5, 0.5]]])
        field = IlluminantField(np.full((2, 2, 3), 1 / np.sqrt(3)))
        with pytest.raises(ValueError):
            correct_image(img, field)

    def test_round_trip_neutralizes_gray_scene(self):
        cfg = SceneConfig(kind="gray-shading", width=96, height=96, seed=9,
                          illuminant=(0.35, 0.55, 0.7))
        img, _ = render_config(cfg)
        est = estimate_global(img, rank_gray(compute_gi(img), 0.1))
        out = correct_image(img, est)
        chroma = out.data / np.linalg.norm(out.data, axis=2, keepdims=True)
        neutral = np.full(3, 1 / np.sqrt(3))
        worst = field_error_deg(chroma, np.broadcast_to(neutral, chroma.shape)).max()
        assert worst < 0.5
