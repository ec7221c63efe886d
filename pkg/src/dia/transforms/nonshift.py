"""Non-shifting stochastic augmentations (crop / flip / jitter / grayscale).

Randomness is materialized into a NonShiftSpec up front, so applying a spec
is deterministic and repeatable.
"""

import math
from dataclasses import dataclass

import numpy as np

from ..kernels import bilinear_resize

GRAY_WEIGHTS = np.array([0.299, 0.587, 0.114], dtype=np.float32)


@dataclass
class NonShiftConfig:
    crop_scale: tuple = (0.54, 1.0)
    crop_ratio: tuple = (3.0 / 4.0, 4.0 / 3.0)
    hflip_p: float = 0.5
    jitter_p: float = 0.8
    jitter_strength: tuple = (0.4, 0.4, 0.4, 0.1)
    grayscale_p: float = 0.2


@dataclass
class NonShiftSpec:
    """All random draws materialized; application is a pure function."""

    crop_top: int
    crop_left: int
    crop_h: int
    crop_w: int
    flip: bool
    brightness: float
    contrast: float
    saturation: float
    hue: float
    grayscale: bool

    @classmethod
    def identity(cls, h: int, w: int) -> "NonShiftSpec":
        return cls(0, 0, h, w, False, 1.0, 1.0, 1.0, 0.0, False)


def sample_nonshift_spec(rng: np.random.Generator, h: int, w: int,
                         config: NonShiftConfig = NonShiftConfig()) -> NonShiftSpec:
    """Draw crop box (area-scale + aspect-ratio, resampled while degenerate),
    flip, jitter factors, and grayscale flag."""
    area = h * w
    crop_h, crop_w = h, w
    for _ in range(10):
        target = area * rng.uniform(*config.crop_scale)
        log_lo, log_hi = (math.log(r) for r in config.crop_ratio)
        ratio = math.exp(rng.uniform(log_lo, log_hi))
        cw = int(round(math.sqrt(target * ratio)))
        ch = int(round(math.sqrt(target / ratio)))
        if 0 < cw <= w and 0 < ch <= h:
            crop_h, crop_w = ch, cw
            break
    top = int(rng.integers(0, h - crop_h + 1))
    left = int(rng.integers(0, w - crop_w + 1))

    if rng.random() < config.jitter_p:
        sb, sc, ss, sh = config.jitter_strength
        brightness = rng.uniform(max(0.0, 1.0 - sb), 1.0 + sb)
        contrast = rng.uniform(max(0.0, 1.0 - sc), 1.0 + sc)
        saturation = rng.uniform(max(0.0, 1.0 - ss), 1.0 + ss)
        hue = rng.uniform(-sh, sh)
    else:
        brightness = contrast = saturation = 1.0
        hue = 0.0

    return NonShiftSpec(
        crop_top=top,
        crop_left=left,
        crop_h=crop_h,
        crop_w=crop_w,
        flip=bool(rng.random() < config.hflip_p),
        brightness=brightness,
        contrast=contrast,
        saturation=saturation,
        hue=hue,
        grayscale=bool(rng.random() < config.grayscale_p),
    )


def _rgb_to_hsv(rgb: np.ndarray) -> np.ndarray:
    r, g, b = rgb
    maxc = rgb.max(axis=0)
    minc = rgb.min(axis=0)
    v = maxc
    delta = maxc - minc
    s = np.where(maxc > 0, delta / np.maximum(maxc, 1e-12), 0.0)
    dz = np.maximum(delta, 1e-12)
    hr = ((g - b) / dz) % 6.0
    hg = (b - r) / dz + 2.0
    hb = (r - g) / dz + 4.0
    hue = np.where(maxc == r, hr, np.where(maxc == g, hg, hb)) / 6.0
    hue = np.where(delta == 0, 0.0, hue)
    return np.stack([hue, s, v]).astype(np.float32)


def _hsv_to_rgb(hsv: np.ndarray) -> np.ndarray:
    h, s, v = hsv
    i = np.floor(h * 6.0)
    f = h * 6.0 - i
    p = v * (1.0 - s)
    q = v * (1.0 - s * f)
    t = v * (1.0 - s * (1.0 - f))
    i = i.astype(np.int64) % 6
    choices = [
        np.stack([v, t, p]),
        np.stack([q, v, p]),
        np.stack([p, v, t]),
        np.stack([p, q, v]),
        np.stack([t, p, v]),
        np.stack([v, p, q]),
    ]
    out = np.choose(i, choices)
    return out.astype(np.float32)


def _to_gray(x: np.ndarray) -> np.ndarray:
    if x.shape[0] == 1:
        return x
    lum = np.tensordot(GRAY_WEIGHTS, x, axes=(0, 0))
    return np.repeat(lum[None], 3, axis=0)


def apply_nonshift(x: np.ndarray, spec: NonShiftSpec) -> np.ndarray:
    """Apply a materialized spec to a (C, H, W) image in [0, 1]."""
    c, h, w = x.shape
    out = x[:, spec.crop_top:spec.crop_top + spec.crop_h,
            spec.crop_left:spec.crop_left + spec.crop_w]
    out = bilinear_resize(np.ascontiguousarray(out), h, w)
    if spec.flip:
        out = np.ascontiguousarray(out[:, :, ::-1])

    if spec.brightness != 1.0:
        out = out * np.float32(spec.brightness)
    if spec.contrast != 1.0:
        mean = _to_gray(out).mean(dtype=np.float32)
        out = (out - mean) * np.float32(spec.contrast) + mean
    if c == 3:
        if spec.saturation != 1.0:
            gray = _to_gray(np.clip(out, 0.0, 1.0))
            out = gray + (out - gray) * np.float32(spec.saturation)
        if spec.hue != 0.0:
            hsv = _rgb_to_hsv(np.clip(out, 0.0, 1.0))
            hsv[0] = (hsv[0] + spec.hue) % 1.0
            out = _hsv_to_rgb(hsv)
    if spec.grayscale:
        out = _to_gray(out)
    return np.clip(out, 0.0, 1.0).astype(np.float32)
