"""DDPM denoiser training: L1 noise-prediction objective with EMA weights."""

from dataclasses import dataclass, field

import numpy as np
import torch

from ..images import to_diffusion_domain
from .checkpoint import DenoiserCheckpoint
from .ema import EmaTracker
from .ops import q_sample
from .schedule import (
    DEFAULT_BETA_END,
    DEFAULT_BETA_START,
    DEFAULT_T,
    build_schedule,
)
from .unet import UNet


@dataclass
class DiffusionTrainConfig:
    steps: int = 25000
    batch_size: int = 16
    lr: float = 8e-5
    grad_accum: int = 2
    ema_decay: float = 0.995
    hflip: bool = True
    T: int = DEFAULT_T
    beta_start: float = DEFAULT_BETA_START
    beta_end: float = DEFAULT_BETA_END
    base_width: int = 64
    channel_mults: tuple = (1, 2, 4)
    blocks_per_level: int = 2
    attention: bool = True
    extra_meta: dict = field(default_factory=dict)


def mean_abs_error(pred, target) -> float:
    pred = np.asarray(pred, dtype=np.float64)
    target = np.asarray(target, dtype=np.float64)
    return float(np.abs(pred - target).mean())


def _dataset_images(dataset) -> np.ndarray:
    images = getattr(dataset, "images", dataset)
    images = np.asarray(images, dtype=np.float32)
    if images.ndim != 4 or images.shape[0] == 0:
        raise ValueError("dataset must hold a non-empty (N, C, H, W) array")
    return images


def train_denoiser(dataset, config: DiffusionTrainConfig, seed: int = 0) -> DenoiserCheckpoint:
    """Train an epsilon predictor; returns raw and EMA weights bundled with
    the schedule. Per step: t ~ U[1, T], minimize |eps_hat - eps|.

    No mixed precision; single-threaded deterministic batch order from seed.
    """
    images = _dataset_images(dataset)
    n, c, h, w = images.shape
    schedule = build_schedule(config.T, config.beta_start, config.beta_end)

    torch.manual_seed(seed)
    rng = np.random.default_rng(seed)
    model = UNet(
        in_channels=c,
        base_width=config.base_width,
        channel_mults=config.channel_mults,
        blocks_per_level=config.blocks_per_level,
        attention=config.attention,
    )
    ema = EmaTracker(model, config.ema_decay)
    opt = torch.optim.Adam(model.parameters(), lr=config.lr)

    model.train()
    running_loss = None
    first_loss = None
    for step in range(config.steps):
        opt.zero_grad()
        accum_loss = 0.0
        for _ in range(config.grad_accum):
            idx = rng.choice(n, size=min(config.batch_size, n), replace=False)
            x0 = images[idx]
            if config.hflip:
                flips = rng.random(len(idx)) < 0.5
                x0 = x0.copy()
                x0[flips] = x0[flips, :, :, ::-1]
            x0 = to_diffusion_domain(x0)
            t = rng.integers(1, schedule.T + 1, size=len(idx))
            eps = rng.standard_normal(x0.shape).astype(np.float32)
            x_t = q_sample(x0, t, eps, schedule)

            pred = model(
                torch.from_numpy(x_t), torch.from_numpy(t.astype(np.int64))
            )
            loss = torch.nn.functional.l1_loss(pred, torch.from_numpy(eps))
            (loss / config.grad_accum).backward()
            accum_loss += loss.item() / config.grad_accum
        opt.step()
        ema.update(model)
        running_loss = (
            accum_loss if running_loss is None
            else 0.95 * running_loss + 0.05 * accum_loss
        )
        if first_loss is None:
            first_loss = accum_loss

    meta = {
        "steps": config.steps,
        "seed": seed,
        "ema_decay": config.ema_decay,
        "lr": config.lr,
        "grad_accum": config.grad_accum,
        "first_loss": round(first_loss, 6) if first_loss is not None else None,
        "final_running_loss": round(running_loss, 6) if running_loss is not None else None,
        "dataset_fingerprint": getattr(dataset, "fingerprint", None),
    }
    meta.update(config.extra_meta)
    return DenoiserCheckpoint(
        model=model,
        ema_state=ema.state_dict(),
        schedule=schedule,
        image_shape=(c, h, w),
        train_meta=meta,
    )
