"""Non-shifting augmentations: identity spec, determinism, range safety."""

import numpy as np

from dia.transforms.nonshift import (
    NonShiftConfig,
    NonShiftSpec,
    apply_nonshift,
    sample_nonshift_spec,
)


def test_identity_spec_is_noop(rng):
    x = rng.random((3, 16, 16)).astype(np.float32)
    out = apply_nonshift(x, NonShiftSpec.identity(16, 16))
    np.testing.assert_allclose(out, x, atol=1e-6)


def test_same_spec_twice_is_bit_identical(rng):
    x = rng.random((3, 16, 16)).astype(np.float32)
    spec = sample_nonshift_spec(rng, 16, 16, NonShiftConfig())
    np.testing.assert_array_equal(
        apply_nonshift(x, spec), apply_nonshift(x, spec)
    )


def test_output_shape_and_range(rng):
    cfg = NonShiftConfig()
    for _ in range(20):
        x = rng.random((3, 12, 12)).astype(np.float32)
        spec = sample_nonshift_spec(rng, 12, 12, cfg)
        out = apply_nonshift(x, spec)
        assert out.shape == x.shape
        assert out.min() >= 0.0 and out.max() <= 1.0


def test_grayscale_idempotent_on_gray(rng):
    gray = np.repeat(rng.random((1, 8, 8)).astype(np.float32), 3, axis=0)
    spec = NonShiftSpec.identity(8, 8)
    spec.grayscale = True
    out = apply_nonshift(gray, spec)
    np.testing.assert_allclose(out, gray, atol=1e-5)


def test_single_channel_images_supported(rng):
    x = rng.random((1, 16, 16)).astype(np.float32)
    for _ in range(10):
        spec = sample_nonshift_spec(rng, 16, 16, NonShiftConfig())
        out = apply_nonshift(x, spec)
        assert out.shape == x.shape
        assert out.min() >= 0.0 and out.max() <= 1.0


def test_flip_spec_mirrors_width(rng):
    x = rng.random((1, 8, 8)).astype(np.float32)
    spec = NonShiftSpec.identity(8, 8)
    spec.flip = True
    np.testing.assert_allclose(apply_nonshift(x, spec), x[:, :, ::-1], atol=1e-6)


def test_crop_boxes_stay_inside_image(rng):
    cfg = NonShiftConfig(crop_scale=(0.2, 1.0))
    for _ in range(200):
        spec = sample_nonshift_spec(rng, 20, 14, cfg)
        assert 0 <= spec.crop_top <= 20 - spec.crop_h
        assert 0 <= spec.crop_left <= 14 - spec.crop_w
        assert spec.crop_h >= 1 and spec.crop_w >= 1


def test_brightness_scales_values(rng):
    x = np.full((3, 8, 8), 0.4, dtype=np.float32)
    spec = NonShiftSpec.identity(8, 8)
    spec.brightness = 1.5
    out = apply_nonshift(x, spec)
    np.testing.assert_allclose(out, 0.6, atol=1e-6)
