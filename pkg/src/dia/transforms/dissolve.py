"""Dissolving back-ends: the diffusion dissolver, heuristic blurs, and the
down-dissolve-up resolution routine."""

from dataclasses import dataclass

import numpy as np

from ..diffusion.ops import dissolve as diffusion_dissolve
from ..kernels import bilinear_resize, gaussian_blur, median_blur

DISSOLVE_METHODS = ("diffusion", "gaussian", "median", "resize_only")


@dataclass
class DissolveConfig:
    t_low: int = 30
    t_high: int = 130
    dissolve_resolution: int = 32
    method: str = "diffusion"
    kernel_size: int = 7

    def __post_init__(self):
        if self.method not in DISSOLVE_METHODS:
            raise ValueError(f"unknown dissolve method {self.method!r}")
        if not (1 <= self.t_low <= self.t_high):
            raise ValueError(
                f"need 1 <= t_low <= t_high, got ({self.t_low}, {self.t_high})"
            )
        if self.method in ("gaussian", "median") and (
            self.kernel_size < 3 or self.kernel_size % 2 == 0
        ):
            raise ValueError(f"kernel_size must be odd >= 3, got {self.kernel_size}")


def heuristic_dissolve(x: np.ndarray, method: str, kernel_size: int) -> np.ndarray:
    """Blur-based stand-in for the diffusion dissolver on a (C, H, W) image."""
    if method == "gaussian":
        return gaussian_blur(x, kernel_size)
    if method == "median":
        return median_blur(x, kernel_size)
    raise ValueError(f"unknown heuristic method {method!r}")


def at_resolution(x: np.ndarray, target_side: int, inner_op) -> np.ndarray:
    """Run inner_op at target_side x target_side, then restore the original
    resolution. Bilinear resampling both ways; no-op resizes are skipped."""
    if target_side < 8:
        raise ValueError(f"target_side must be >= 8, got {target_side}")
    c, h, w = x.shape
    small = bilinear_resize(np.ascontiguousarray(x), target_side, target_side)
    small = inner_op(small)
    return bilinear_resize(np.ascontiguousarray(small), h, w)


def build_dissolver(config: DissolveConfig, denoiser=None):
    """Return dissolver(images (n, C, H, W), t (n,)) -> (n, C, H, W).

    The diffusion method batches the network evaluation over all n images at
    the dissolving resolution; heuristics ignore t.
    """
    if config.method == "diffusion" and denoiser is None:
        raise ValueError("diffusion dissolving requires a denoiser checkpoint")
    if denoiser is not None and config.t_high > denoiser.schedule.T:
        raise ValueError(
            f"t_high {config.t_high} exceeds schedule T={denoiser.schedule.T}"
        )
    side = config.dissolve_resolution

    def dissolver(images: np.ndarray, t: np.ndarray) -> np.ndarray:
        n, c, h, w = images.shape
        small = np.stack(
            [bilinear_resize(np.ascontiguousarray(im), side, side) for im in images]
        )
        if config.method == "diffusion":
            small = diffusion_dissolve(small, np.asarray(t), denoiser)
        elif config.method in ("gaussian", "median"):
            small = np.stack(
                [heuristic_dissolve(im, config.method, config.kernel_size)
                 for im in small]
            )
        # resize_only: the down-up resampling is the whole transform
        return np.stack(
            [bilinear_resize(np.ascontiguousarray(im), h, w) for im in small]
        )

    return dissolver
