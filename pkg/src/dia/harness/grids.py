"""Dissolve-grid figure emission: rows = input images, columns = original
followed by dissolved versions at increasing timesteps."""

import numpy as np
from PIL import Image

from ..transforms.dissolve import DissolveConfig, build_dissolver

DEFAULT_T_LIST = (50, 100, 200, 400)


def dissolve_grid_array(denoiser, images: np.ndarray, t_list=DEFAULT_T_LIST,
                        pad: int = 2) -> np.ndarray:
    """Assemble the grid as a (C, rows*H + padding, cols*W + padding) array.

    Column 0 holds the originals; t=0 entries are identity columns. All
    dissolving runs at the denoiser's native resolution regardless of the
    input size.
    """
    images = np.asarray(images, dtype=np.float32)
    if images.ndim != 4 or images.shape[0] < 1:
        raise ValueError("need a non-empty (n, C, H, W) image array")
    t_list = [int(t) for t in t_list]
    for t in t_list:
        if t < 0 or t > denoiser.schedule.T:
            raise ValueError(f"t={t} outside schedule [0, {denoiser.schedule.T}]")
    n, c, h, w = images.shape

    columns = [images]
    positive = [t for t in t_list if t > 0]
    if positive:
        cfg = DissolveConfig(
            t_low=min(positive), t_high=max(positive),
            dissolve_resolution=denoiser.image_shape[-1], method="diffusion",
        )
        dissolver = build_dissolver(cfg, denoiser)
    for t in t_list:
        if t == 0:
            columns.append(images.copy())
        else:
            columns.append(dissolver(images, np.full(n, t)))

    n_cols = len(columns)
    grid = np.ones(
        (c, n * h + (n + 1) * pad, n_cols * w + (n_cols + 1) * pad),
        dtype=np.float32,
    )
    for col, block in enumerate(columns):
        x0 = pad + col * (w + pad)
        for row in range(n):
            y0 = pad + row * (h + pad)
            grid[:, y0:y0 + h, x0:x0 + w] = np.clip(block[row], 0.0, 1.0)
    return grid


def save_grid(grid: np.ndarray, path) -> None:
    arr = (np.clip(grid, 0.0, 1.0) * 255.0).round().astype(np.uint8)
    if arr.shape[0] == 1:
        img = Image.fromarray(arr[0], mode="L")
    else:
        img = Image.fromarray(arr.transpose(1, 2, 0), mode="RGB")
    img.save(path)
