"""Forward diffusion, single-step dissolving, and the sampling reverse step.

The closed-form ops (`q_sample`, `dissolve_from_eps`, `reverse_step_from_eps`)
are pure array formulas and apply in whatever pixel domain the caller uses.
`dissolve` and `reverse_step` are the network-backed versions; `dissolve`
takes canonical [0, 1] images, maps them to the [-1, 1] diffusion domain
around the network evaluation, and clamps the output back to [0, 1].
"""

import numpy as np

from ..images import as_array, from_diffusion_domain, to_diffusion_domain
from .schedule import DiffusionSchedule


def _per_sample(values, batch_shape):
    """Broadcast per-sample scalars over (B, C, H, W)."""
    v = np.asarray(values, dtype=np.float64)
    if v.ndim == 0:
        return v
    return v.reshape(-1, *([1] * (len(batch_shape) - 1)))


def _formula_array(x):
    """Closed-form ops preserve float64 inputs; everything else is float32."""
    x = as_array(x) if not isinstance(x, np.ndarray) else x
    if x.dtype != np.float64:
        x = np.asarray(x, dtype=np.float32)
    return x


def _cast_like(out, *inputs):
    dtype = np.result_type(np.float32, *[a.dtype for a in inputs])
    return out.astype(dtype)


def q_sample(x0, t, eps, schedule: DiffusionSchedule) -> np.ndarray:
    """Closed-form forward noising: x_t = sqrt(ab_t) x0 + sqrt(1 - ab_t) eps.

    `t` is a scalar or a per-sample vector of 1-indexed timesteps.
    """
    x0 = _formula_array(x0)
    eps = _formula_array(eps)
    if eps.shape != x0.shape:
        raise ValueError(f"eps shape {eps.shape} != x0 shape {x0.shape}")
    ab = schedule.alpha_bar(t)
    sqrt_ab = _per_sample(np.sqrt(ab), x0.shape)
    sqrt_1mab = _per_sample(np.sqrt(1.0 - ab), x0.shape)
    return _cast_like(sqrt_ab * x0 + sqrt_1mab * eps, x0, eps)


def dissolve_from_eps(x, t, eps_pred, schedule: DiffusionSchedule) -> np.ndarray:
    """Single-step estimate of the clean image from a noise prediction:

        x_hat = sqrt(1/ab_t) x - sqrt(1/ab_t - 1) eps_pred

    Pure formula; no domain mapping or clamping.
    """
    x = _formula_array(x)
    eps_pred = _formula_array(eps_pred)
    if eps_pred.shape != x.shape:
        raise ValueError(f"eps shape {eps_pred.shape} != x shape {x.shape}")
    recip_ab = 1.0 / schedule.alpha_bar(t)
    a = _per_sample(np.sqrt(recip_ab), x.shape)
    b = _per_sample(np.sqrt(recip_ab - 1.0), x.shape)
    return _cast_like(a * x - b * eps_pred, x, eps_pred)


def dissolve(x, t, denoiser, use_ema: bool = True) -> np.ndarray:
    """Dissolving transformation: one reverse-diffusion evaluation applied
    directly to a clean [0, 1] image, removing instance-specific detail.

    `t` controls the strength. Single network evaluation, no iteration.
    Output is clamped back to [0, 1].
    """
    x = as_array(x)
    _check_denoiser_shape(x, denoiser)
    xd = to_diffusion_domain(x)
    eps = denoiser.predict_eps(xd, _t_vector(t, len(x), denoiser.schedule), use_ema)
    out = dissolve_from_eps(xd, t, eps, denoiser.schedule)
    return np.clip(from_diffusion_domain(out), 0.0, 1.0)


def reverse_step_from_eps(x_t, t, eps_pred, schedule, noise=None) -> np.ndarray:
    """One ancestral sampling step (sigma_t = sqrt(beta_t); none at t = 1)."""
    x_t = as_array(x_t)
    schedule.check_t(t)
    if np.ndim(t) != 0:
        raise ValueError("reverse_step uses a single shared timestep")
    t = int(t)
    beta = schedule.betas[t - 1]
    alpha = schedule.alphas[t - 1]
    ab = schedule.alpha_bars[t - 1]
    mean = (x_t - (beta / np.sqrt(1.0 - ab)) * eps_pred) / np.sqrt(alpha)
    mean = mean.astype(np.float32)
    if t == 1 or noise is None:
        return mean
    noise = np.asarray(noise, dtype=np.float32)
    return mean + np.float32(np.sqrt(beta)) * noise


def reverse_step(x_t, t, denoiser, noise=None, use_ema: bool = True) -> np.ndarray:
    """Network-backed reverse step in the diffusion domain, for sampling
    chains used to sanity-check trained denoisers."""
    x_t = as_array(x_t)
    eps = denoiser.predict_eps(
        x_t, _t_vector(t, len(x_t), denoiser.schedule), use_ema
    )
    return reverse_step_from_eps(x_t, t, eps, denoiser.schedule, noise=noise)


def _t_vector(t, batch_size: int, schedule: DiffusionSchedule) -> np.ndarray:
    schedule.check_t(t)
    t = np.asarray(t, dtype=np.int64)
    if t.ndim == 0:
        return np.full(batch_size, int(t), dtype=np.int64)
    if t.shape != (batch_size,):
        raise ValueError(f"t shape {t.shape} incompatible with batch {batch_size}")
    return t


def _check_denoiser_shape(x: np.ndarray, denoiser) -> None:
    expected = getattr(denoiser, "image_shape", None)
    if expected is not None and tuple(x.shape[1:]) != tuple(expected):
        raise ValueError(
            f"image shape {x.shape[1:]} does not match denoiser {tuple(expected)}"
        )
