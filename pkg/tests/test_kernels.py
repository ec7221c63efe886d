"""Image kernels: backend parity, hand oracles, and a torch resize oracle."""

import numpy as np
import pytest
import torch

from dia.kernels import _numpy as np_impl
from dia.kernels import gaussian_kernel

try:
    from dia.kernels import _numba as nb_impl
    HAVE_NUMBA = True
except ImportError:
    HAVE_NUMBA = False

KERNEL_FNS = ["bilinear_resize", "gaussian_blur", "median_blur"]


@pytest.mark.parametrize("size", [3, 5, 7, 11])
def test_gaussian_kernel_normalized_symmetric(size):
    k = gaussian_kernel(size)
    assert k.shape == (size,)
    assert k.sum() == pytest.approx(1.0, abs=1e-9)
    np.testing.assert_allclose(k, k[::-1])


@pytest.mark.skipif(not HAVE_NUMBA, reason="numba backend unavailable")
@pytest.mark.parametrize("name,args", [
    ("bilinear_resize", (24, 17)),
    ("bilinear_resize", (64, 64)),
    ("gaussian_blur", (7,)),
    ("gaussian_blur", (3,)),
    ("median_blur", (5,)),
])
def test_backends_agree(rng, name, args):
    img = rng.random((3, 31, 29)).astype(np.float32)
    out_np = getattr(np_impl, name)(img, *args)
    out_nb = getattr(nb_impl, name)(img, *args)
    np.testing.assert_allclose(out_np, out_nb, atol=3e-6)


def test_resize_same_size_is_identity(rng):
    img = rng.random((1, 16, 16)).astype(np.float32)
    out = np_impl.bilinear_resize(img, 16, 16)
    np.testing.assert_array_equal(out, img)


def test_resize_matches_torch_bilinear(rng):
    img = rng.random((3, 32, 32)).astype(np.float32)
    for out_h, out_w in [(16, 16), (48, 48), (20, 36)]:
        ours = np_impl.bilinear_resize(img, out_h, out_w)
        ref = torch.nn.functional.interpolate(
            torch.from_numpy(img)[None], size=(out_h, out_w),
            mode="bilinear", align_corners=False,
        )[0].numpy()
        np.testing.assert_allclose(ours, ref, atol=2e-6)


def test_blur_preserves_constant_images():
    img = np.full((1, 10, 10), 0.37, dtype=np.float32)
    np.testing.assert_allclose(np_impl.gaussian_blur(img, 7), img, atol=1e-6)
    np.testing.assert_array_equal(np_impl.median_blur(img, 5), img)


def test_median_removes_isolated_speck():
    img = np.zeros((1, 5, 5), dtype=np.float32)
    img[0, 2, 2] = 1.0
    out = np_impl.median_blur(img, 3)
    assert out[0, 2, 2] == 0.0


def test_gaussian_blur_reduces_variance(rng):
    img = rng.random((1, 32, 32)).astype(np.float32)
    out = np_impl.gaussian_blur(img, 7)
    assert out.var() < img.var()
    # DC preserved up to border effects
    assert abs(float(out.mean()) - float(img.mean())) < 5e-3


@pytest.mark.parametrize("bad", [2, 4, 1, -3])
def test_even_or_invalid_kernel_rejected(bad, rng):
    img = rng.random((1, 8, 8)).astype(np.float32)
    with pytest.raises(ValueError):
        np_impl.gaussian_blur(img, bad)


def test_oversized_kernel_rejected(rng):
    img = rng.random((1, 5, 5)).astype(np.float32)
    with pytest.raises(ValueError):
        np_impl.median_blur(img, 7)


def test_env_flag_selects_numpy_backend():
    import subprocess
    import sys
    out = subprocess.run(
        [sys.executable, "-c",
         "import dia.kernels as k; print(k.BACKEND)"],
        env={"DIA_PURE_NUMPY": "1", "PATH": "/usr/bin:/bin"},
        capture_output=True, text=True,
    )
    assert out.stdout.strip() == "numpy", out.stderr
