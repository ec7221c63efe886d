"""Pure-numpy reference implementations of the image kernels.

These are the fallback path when numba is unavailable or disabled via
``DIA_PURE_NUMPY=1``. The numba implementations in ``_numba.py`` follow the
same conventions exactly: half-pixel-center bilinear sampling and
reflect-101 borders (edge pixel not repeated) for the blurs.
"""

import numpy as np


def gaussian_kernel(kernel_size: int) -> np.ndarray:
    """1-D Gaussian weights, normalized to sum to 1.

    Sigma follows the usual kernel-size heuristic so that the tails are
    close to zero at the window edge.
    """
    if kernel_size < 3 or kernel_size % 2 == 0:
        raise ValueError(f"kernel_size must be odd and >= 3, got {kernel_size}")
    sigma = 0.3 * ((kernel_size - 1) * 0.5 - 1) + 0.8
    half = kernel_size // 2
    x = np.arange(-half, half + 1, dtype=np.float64)
    w = np.exp(-0.5 * (x / sigma) ** 2)
    return w / w.sum()


def _check_kernel(img: np.ndarray, kernel_size: int) -> None:
    if kernel_size < 3 or kernel_size % 2 == 0:
        raise ValueError(f"kernel_size must be odd and >= 3, got {kernel_size}")
    if kernel_size >= min(img.shape[-2], img.shape[-1]):
        raise ValueError(
            f"kernel_size {kernel_size} too large for image {img.shape[-2:]}"
        )


def bilinear_resize(img: np.ndarray, out_h: int, out_w: int) -> np.ndarray:
    """Resize a (C, H, W) float32 image with bilinear interpolation.

    Uses half-pixel source centers (align_corners=False convention). Returns
    the input unchanged (same array) when the size already matches.
    """
    c, h, w = img.shape
    if (h, w) == (out_h, out_w):
        return img
    out = np.empty((c, out_h, out_w), dtype=np.float32)

    ys = (np.arange(out_h, dtype=np.float32) + 0.5) * (h / out_h) - 0.5
    xs = (np.arange(out_w, dtype=np.float32) + 0.5) * (w / out_w) - 0.5
    ys = np.clip(ys, 0.0, h - 1.0)
    xs = np.clip(xs, 0.0, w - 1.0)
    y0 = np.minimum(ys.astype(np.int64), h - 2)
    x0 = np.minimum(xs.astype(np.int64), w - 2)
    wy = (ys - y0).astype(np.float32)[:, None]
    wx = (xs - x0).astype(np.float32)[None, :]

    for ch in range(c):
        p = img[ch]
        top = p[y0][:, x0] * (1 - wx) + p[y0][:, x0 + 1] * wx
        bot = p[y0 + 1][:, x0] * (1 - wx) + p[y0 + 1][:, x0 + 1] * wx
        out[ch] = top * (1 - wy) + bot * wy
    return out


def gaussian_blur(img: np.ndarray, kernel_size: int) -> np.ndarray:
    """Separable Gaussian blur of a (C, H, W) image, reflect-101 borders."""
    _check_kernel(img, kernel_size)
    w1d = gaussian_kernel(kernel_size)
    half = kernel_size // 2
    out = np.empty_like(img, dtype=np.float32)
    for ch in range(img.shape[0]):
        p = np.pad(img[ch], half, mode="reflect")
        # horizontal pass then vertical pass
        win = np.lib.stride_tricks.sliding_window_view(p, kernel_size, axis=1)
        p = (win @ w1d).astype(np.float32)
        win = np.lib.stride_tricks.sliding_window_view(p, kernel_size, axis=0)
        out[ch] = (win @ w1d).astype(np.float32)
    return out


def median_blur(img: np.ndarray, kernel_size: int) -> np.ndarray:
    """Median filter of a (C, H, W) image, reflect-101 borders."""
    _check_kernel(img, kernel_size)
    half = kernel_size // 2
    out = np.empty_like(img, dtype=np.float32)
    for ch in range(img.shape[0]):
        p = np.pad(img[ch], half, mode="reflect")
        win = np.lib.stride_tricks.sliding_window_view(p, (kernel_size, kernel_size))
        out[ch] = np.median(win, axis=(-2, -1))
    return out
