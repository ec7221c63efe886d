"""Canonical image batch container and pixel-domain helpers.

Images are stored as float32 (batch, channels, height, width) in [0, 1].
The diffusion ops work on the affinely mapped [-1, 1] domain.
"""

from dataclasses import dataclass

import numpy as np

RANGE_TOL = 1e-6


@dataclass
class ImageBatch:
    data: np.ndarray
    value_range: tuple = (0.0, 1.0)

    def __post_init__(self):
        data = np.asarray(self.data, dtype=np.float32)
        if data.ndim != 4:
            raise ValueError(f"expected (B, C, H, W) array, got shape {data.shape}")
        if data.shape[1] not in (1, 3):
            raise ValueError(f"channels must be 1 or 3, got {data.shape[1]}")
        lo, hi = self.value_range
        if data.size and (data.min() < lo - RANGE_TOL or data.max() > hi + RANGE_TOL):
            raise ValueError(
                f"values [{data.min()}, {data.max()}] outside declared "
                f"range [{lo}, {hi}]"
            )
        self.data = data

    def __len__(self):
        return self.data.shape[0]

    @property
    def image_shape(self):
        return self.data.shape[1:]


def as_array(x) -> np.ndarray:
    """Accept an ImageBatch or a plain (B, C, H, W) array."""
    if isinstance(x, ImageBatch):
        return x.data
    return np.asarray(x, dtype=np.float32)


def to_diffusion_domain(x01: np.ndarray) -> np.ndarray:
    return (x01.astype(np.float32) * 2.0 - 1.0).astype(np.float32)


def from_diffusion_domain(x: np.ndarray) -> np.ndarray:
    return ((x.astype(np.float32) + 1.0) * 0.5).astype(np.float32)
