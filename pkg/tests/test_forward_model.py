"""Measurement matrix assembly, bucket detection, and noise injection."""

import numpy as np
import pytest

from speckle_cs.forward_model import (
    NoiseSpec,
    add_noise,
    build_matrix,
    matrix_from_patterns,
    measure,
    resize_area,
)
from speckle_cs.seeds import seed_entropy
from speckle_cs.speckle import SpeckleConfig, generate_speckle


class TestBuildMatrix:
    def test_shape(self):
        A = build_matrix(7, SpeckleConfig(grid=12, cutoff=0.3, seed=0))
        assert A.shape == (7, 144)

    def test_rows_are_flattened_patterns(self):
        config = SpeckleConfig(grid=10, cutoff=0.4, seed=21)
        A = build_matrix(3, config)
        for i in range(3):
            row_config = SpeckleConfig(10, 0.4, seed_entropy(21, i))
            np.testing.assert_array_equal(A[i], generate_speckle(row_config).ravel())

    def test_rows_distinct(self):
        A = build_matrix(4, SpeckleConfig(grid=8, cutoff=0.5, seed=0))
        for i in range(4):
            for j in range(i + 1, 4):
                assert not np.array_equal(A[i], A[j])

    def test_deterministic(self):
        config = SpeckleConfig(grid=8, cutoff=0.5, seed=13)
        np.testing.assert_array_equal(build_matrix(5, config), build_matrix(5, config))

    def test_rejects_zero_count(self):
        with pytest.raises(ValueError):
            build_matrix(0, SpeckleConfig())

    def test_nonnegative_entries(self):
        A = build_matrix(3, SpeckleConfig(grid=16, cutoff=0.2, seed=2))
        assert A.min() >= 0.0


class TestMeasure:
    def test_against_triple_loop_oracle(self):
        """y_i = sum over pixels of pattern_i * image, summed explicitly."""
        rng = np.random.default_rng(6)
        patterns = rng.random((4, 5, 5))
        image = rng.random((5, 5))
        A = patterns.reshape(4, -1)
        expected = np.zeros(4)
        for i in range(4):
            for r in range(5):
                for c in range(5):
                    expected[i] += patterns[i, r, c] * image[r, c]
        np.testing.assert_allclose(measure(A, image), expected, rtol=1e-13)

    def test_accepts_flat_vector(self):
        rng = np.random.default_rng(7)
        A = rng.random((3, 9))
        x = rng.random(9)
        np.testing.assert_allclose(measure(A, x), A @ x)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            measure(np.zeros((3, 16)), np.zeros((5, 5)))

    def test_linearity(self):
        rng = np.random.default_rng(8)
        A = rng.random((6, 16))
        a, b = rng.random((4, 4)), rng.random((4, 4))
        lhs = measure(A, 2.0 * a + b)
        np.testing.assert_allclose(lhs, 2.0 * measure(A, a) + measure(A, b), rtol=1e-12)


class TestAddNoise:
    def test_level_zero_is_exact_copy(self):
        rng = np.random.default_rng(0)
        y = rng.random(50)
        out = add_noise(y, NoiseSpec(0.0, seed=3))
        np.testing.assert_array_equal(out, y)
        assert out is not y

    def test_noise_scale_tracks_signal_std(self):
        """Monte Carlo: added noise std ~= level * sample std of the target."""
        rng = np.random.default_rng(1)
        y = rng.normal(5.0, 2.0, size=200_000)
        level = 0.1
        noised = add_noise(y, NoiseSpec(level, seed=4))
        delta = noised - y
        target = level * y.std(ddof=1)
        assert delta.std() == pytest.approx(target, rel=0.02)
        assert abs(delta.mean()) < 0.01 * target

    def test_matrix_and_vector_shapes(self):
        rng = np.random.default_rng(2)
        A = rng.random((10, 30))
        out = add_noise(A, NoiseSpec(0.2, seed=5))
        assert out.shape == A.shape

    def test_deterministic(self):
        y = np.linspace(0, 1, 100)
        a = add_noise(y, NoiseSpec(0.05, seed=9))
        b = add_noise(y, NoiseSpec(0.05, seed=9))
        np.testing.assert_array_equal(a, b)

    def test_seed_streams_independent(self):
        y = np.linspace(0, 1, 100)
        a = add_noise(y, NoiseSpec(0.05, seed=1)) - y
        b = add_noise(y, NoiseSpec(0.05, seed=2)) - y
        assert abs(np.corrcoef(a, b)[0, 1]) < 0.3

    def test_rejects_negative_level(self):
        with pytest.raises(ValueError):
            NoiseSpec(-0.1)


class TestResizeArea:
    def test_identity_when_same_shape(self):
        rng = np.random.default_rng(3)
        img = rng.random((6, 6))
        np.testing.assert_allclose(resize_area(img, (6, 6)), img, atol=1e-12)

    def test_2x2_block_average(self):
        img = np.array([[1.0, 3.0], [5.0, 7.0]])
        out = resize_area(img, (1, 1))
        assert out.shape == (1, 1)
        assert out[0, 0] == pytest.approx(4.0)

    def test_constant_stays_constant(self):
        img = np.full((9, 9), 2.5)
        out = resize_area(img, (4, 4))
        np.testing.assert_allclose(out, 2.5, atol=1e-12)

    def test_mean_preserved(self):
        rng = np.random.default_rng(4)
        img = rng.random((15, 15))
        out = resize_area(img, (7, 7))
        assert out.mean() == pytest.approx(img.mean(), abs=1e-12)

    def test_upsample_shape(self):
        img = np.eye(3)
        assert resize_area(img, (7, 7)).shape == (7, 7)


class TestMatrixFromPatterns:
    def test_stacks_and_flattens(self):
        rng = np.random.default_rng(5)
        patterns = [rng.random((4, 4)) for _ in range(3)]
        A = matrix_from_patterns(patterns)
        assert A.shape == (3, 16)
        np.testing.assert_array_equal(A[1], patterns[1].ravel())

    def test_resizes_to_grid(self):
        rng = np.random.default_rng(6)
        patterns = [rng.random((8, 8)) for _ in range(2)]
        A = matrix_from_patterns(patterns, grid=4)
        assert A.shape == (2, 16)

    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            matrix_from_patterns([])
