"""Numba-jitted image kernels.

Numerically equivalent to ``_numpy.py`` (same sampling and border
conventions); the loops here avoid the temporary padded copies and window
views of the numpy path.
"""

import numpy as np
from numba import njit

from ._numpy import _check_kernel, gaussian_kernel


@njit(cache=True)
def _reflect101(i, n):
    if i < 0:
        return -i
    if i >= n:
        return 2 * n - 2 - i
    return i


@njit(cache=True)
def _bilinear_resize_jit(img, out_h, out_w):
    c, h, w = img.shape
    out = np.empty((c, out_h, out_w), dtype=np.float32)
    sy = h / out_h
    sx = w / out_w
    for oy in range(out_h):
        y = (oy + 0.5) * sy - 0.5
        if y < 0.0:
            y = 0.0
        if y > h - 1.0:
            y = h - 1.0
        y0 = int(y)
        if y0 > h - 2:
            y0 = h - 2
        wy = np.float32(y - y0)
        for ox in range(out_w):
            x = (ox + 0.5) * sx - 0.5
            if x < 0.0:
                x = 0.0
            if x > w - 1.0:
                x = w - 1.0
            x0 = int(x)
            if x0 > w - 2:
                x0 = w - 2
            wx = np.float32(x - x0)
            for ch in range(c):
                top = img[ch, y0, x0] * (1 - wx) + img[ch, y0, x0 + 1] * wx
                bot = img[ch, y0 + 1, x0] * (1 - wx) + img[ch, y0 + 1, x0 + 1] * wx
                out[ch, oy, ox] = top * (1 - wy) + bot * wy
    return out


@njit(cache=True)
def _gaussian_blur_jit(img, w1d):
    c, h, w = img.shape
    k = w1d.shape[0]
    half = k // 2
    tmp = np.empty((h, w), dtype=np.float32)
    out = np.empty((c, h, w), dtype=np.float32)
    for ch in range(c):
        for y in range(h):
            for x in range(w):
                acc = np.float32(0.0)
                for j in range(k):
                    acc += w1d[j] * img[ch, y, _reflect101(x + j - half, w)]
                tmp[y, x] = acc
        for y in range(h):
            for x in range(w):
                acc = np.float32(0.0)
                for j in range(k):
                    acc += w1d[j] * tmp[_reflect101(y + j - half, h), x]
                out[ch, y, x] = acc
    return out


@njit(cache=True)
def _median_blur_jit(img, k):
    c, h, w = img.shape
    half = k // 2
    out = np.empty((c, h, w), dtype=np.float32)
    buf = np.empty(k * k, dtype=np.float32)
    for ch in range(c):
        for y in range(h):
            for x in range(w):
                idx = 0
                for dy in range(-half, half + 1):
                    yy = _reflect101(y + dy, h)
                    for dx in range(-half, half + 1):
                        buf[idx] = img[ch, yy, _reflect101(x + dx, w)]
                        idx += 1
                out[ch, y, x] = np.median(buf)
    return out


def bilinear_resize(img: np.ndarray, out_h: int, out_w: int) -> np.ndarray:
    if img.shape[1:] == (out_h, out_w):
        return img
    return _bilinear_resize_jit(np.ascontiguousarray(img), out_h, out_w)


def gaussian_blur(img: np.ndarray, kernel_size: int) -> np.ndarray:
    _check_kernel(img, kernel_size)
    w1d = gaussian_kernel(kernel_size).astype(np.float32)
    return _gaussian_blur_jit(np.ascontiguousarray(img), w1d)


def median_blur(img: np.ndarray, kernel_size: int) -> np.ndarray:
    _check_kernel(img, kernel_size)
    return _median_blur_jit(np.ascontiguousarray(img), kernel_size)
