"""HOG descriptor geometry, determinism and analytic gradient checks."""

import numpy as np
import pytest

from seqvpr.errors import ImageTooSmall
from seqvpr.hog import HogConfig, bilinear_resize, hog_descriptor

SMALL = HogConfig(resize=(32, 32), cell=8, bins=9, block=2)


class TestHogConfig:
    def test_length_formula(self):
        assert SMALL.length == 3 * 3 * 2 * 2 * 9
        assert HogConfig().length == 15 * 15 * 2 * 2 * 9

    def test_resize_must_align_with_cells(self):
        with pytest.raises(ValueError):
            HogConfig(resize=(30, 32), cell=8)

    def test_block_exceeding_grid_rejected(self):
        with pytest.raises(ImageTooSmall):
            HogConfig(resize=(16, 16), cell=8, block=3)


class TestBilinearResize:
    def test_identity_when_same_size(self):
        rng = np.random.default_rng(40)
        img = rng.uniform(0, 255, size=(9, 13))
        np.testing.assert_allclose(bilinear_resize(img, 13, 9), img, atol=1e-12)

    def test_constant_image_stays_constant(self):
        img = np.full((10, 10), 77.0)
        out = bilinear_resize(img, 23, 7)
        np.testing.assert_allclose(out, 77.0)
        assert out.shape == (7, 23)


class TestHogDescriptor:
    def test_constant_image_gives_zero_descriptor(self):
        img = np.full((40, 40), 128, dtype=np.uint8)
        desc = hog_descriptor(img, SMALL)
        assert desc.shape == (SMALL.length,)
        np.testing.assert_array_equal(desc, np.zeros(SMALL.length))

    def test_identical_images_give_identical_descriptors(self):
        rng = np.random.default_rng(41)
        img = rng.integers(0, 256, size=(50, 60), dtype=np.uint8)
        a = hog_descriptor(img, SMALL)
        b = hog_descriptor(img.copy(), SMALL)
        np.testing.assert_array_equal(a, b)
        cos = a @ b / (np.linalg.norm(a) * np.linalg.norm(b))
        assert cos == pytest.approx(1.0)

    def test_vertical_edge_mass_lands_in_horizontal_gradient_bin(self):
        # A vertical edge has a purely horizontal gradient: orientation 0,
        # which is bin 0 of the unsigned [0, 180) histogram.
        img = np.zeros((32, 32))
        img[:, 16:] = 255.0
        desc = hog_descriptor(img, SMALL)
        per_bin = desc.reshape(-1, SMALL.bins).sum(axis=0)
        assert np.argmax(per_bin) == 0
        assert per_bin[0] > 0.9 * per_bin.sum()

    def test_horizontal_edge_lands_in_vertical_gradient_bin(self):
        img = np.zeros((32, 32))
        img[16:, :] = 255.0
        desc = hog_descriptor(img, SMALL)
        per_bin = desc.reshape(-1, SMALL.bins).sum(axis=0)
        # orientation 90 degrees sits split between bins 4 and 5 of 9
        assert np.argmax(per_bin) in (4, 5)

    def test_block_norms_bounded(self):
        rng = np.random.default_rng(42)
        img = rng.integers(0, 256, size=(64, 64), dtype=np.uint8)
        desc = hog_descriptor(img, SMALL)
        blocks = desc.reshape(-1, SMALL.block**2 * SMALL.bins)
        norms = np.linalg.norm(blocks, axis=1)
        assert np.all(norms <= 1.0 + 1e-9)

    def test_empty_or_tiny_image_rejected(self):
        with pytest.raises(ImageTooSmall):
            hog_descriptor(np.zeros((1, 5)), SMALL)
        with pytest.raises(ImageTooSmall):
            hog_descriptor(np.zeros((0, 0)), SMALL)
