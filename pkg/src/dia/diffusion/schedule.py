"""Noise schedule tables for the denoising diffusion process."""

from dataclasses import dataclass, field

import numpy as np

DEFAULT_T = 1000
DEFAULT_BETA_START = 1e-4
DEFAULT_BETA_END = 0.02


@dataclass(frozen=True)
class DiffusionSchedule:
    """Per-timestep beta/alpha tables, indexed by t in [1, T].

    Arrays are 0-indexed: ``betas[t - 1]`` is the variance added at step t.
    ``alpha_bars`` is the running product of ``alphas``, computed in extended
    precision before being stored as float64.
    """

    T: int
    betas: np.ndarray
    alphas: np.ndarray = field(init=False)
    alpha_bars: np.ndarray = field(init=False)

    def __post_init__(self):
        betas = np.asarray(self.betas, dtype=np.float64)
        if betas.ndim != 1 or betas.shape[0] != self.T or self.T < 1:
            raise ValueError("betas must be a length-T vector with T >= 1")
        if not (np.all(betas > 0.0) and np.all(betas < 1.0)):
            raise ValueError("betas must lie strictly inside (0, 1)")
        if self.T > 1 and not np.all(np.diff(betas) > 0.0):
            raise ValueError("betas must be strictly increasing")
        alphas = 1.0 - betas
        alpha_bars = np.cumprod(alphas.astype(np.longdouble)).astype(np.float64)
        object.__setattr__(self, "betas", betas)
        object.__setattr__(self, "alphas", alphas)
        object.__setattr__(self, "alpha_bars", alpha_bars)

    def check_t(self, t) -> None:
        t = np.asarray(t)
        if np.any(t < 1) or np.any(t > self.T):
            raise ValueError(f"timestep {t} outside [1, {self.T}]")

    def alpha_bar(self, t):
        """alpha_bar at timestep(s) t (1-indexed)."""
        self.check_t(t)
        return self.alpha_bars[np.asarray(t) - 1]


def build_schedule(
    T: int = DEFAULT_T,
    beta_start: float = DEFAULT_BETA_START,
    beta_end: float = DEFAULT_BETA_END,
    kind: str = "linear",
) -> DiffusionSchedule:
    """Build a noise schedule. Only the linear ramp is supported."""
    if kind != "linear":
        raise ValueError(f"unsupported schedule kind: {kind!r}")
    if not (0.0 < beta_start < beta_end < 1.0):
        raise ValueError(
            f"need 0 < beta_start < beta_end < 1, got ({beta_start}, {beta_end})"
        )
    if T < 1:
        raise ValueError(f"T must be >= 1, got {T}")
    if T == 1:
        betas = np.array([beta_start], dtype=np.float64)
    else:
        betas = np.linspace(beta_start, beta_end, T, dtype=np.float64)
    return DiffusionSchedule(T=T, betas=betas)
