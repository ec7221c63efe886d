"""Trained denoiser bundle: raw weights, EMA shadow, schedule, metadata.

On disk a checkpoint is a directory with two files:
  weights.npz   raw/... and ema/... parameter arrays plus schedule/betas
  manifest.txt  key = value lines (format version, shapes, train metadata)
"""

from pathlib import Path

import numpy as np
import torch

from ..io_utils import parse_literal, read_kv, write_kv
from .schedule import DiffusionSchedule
from .unet import UNet

FORMAT_VERSION = 1


class DenoiserCheckpoint:
    """Immutable after training; safe to share read-only across evaluators."""

    def __init__(self, model: UNet, ema_state: dict, schedule: DiffusionSchedule,
                 image_shape, train_meta: dict):
        self.model = model.eval()
        for p in self.model.parameters():
            p.requires_grad_(False)
        self.ema_model = UNet(**model.config).eval()
        self.ema_model.load_state_dict(ema_state)
        for p in self.ema_model.parameters():
            p.requires_grad_(False)
        self.schedule = schedule
        self.image_shape = tuple(image_shape)
        self.train_meta = dict(train_meta)

    @torch.no_grad()
    def predict_eps(self, x: np.ndarray, t: np.ndarray, use_ema: bool = True) -> np.ndarray:
        """Predicted noise for diffusion-domain images x at timesteps t."""
        net = self.ema_model if use_ema else self.model
        xt = torch.from_numpy(np.ascontiguousarray(x, dtype=np.float32))
        tt = torch.from_numpy(np.ascontiguousarray(t, dtype=np.int64))
        return net(xt, tt).numpy()

    def save(self, directory) -> Path:
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        arrays = {"schedule/betas": self.schedule.betas}
        for name, p in sorted(self.model.state_dict().items()):
            arrays[f"raw/{name}"] = p.numpy()
        for name, p in sorted(self.ema_model.state_dict().items()):
            arrays[f"ema/{name}"] = p.numpy()
        np.savez(directory / "weights.npz", **arrays)
        manifest = {
            "format_version": FORMAT_VERSION,
            "schedule_T": self.schedule.T,
            "image_shape": self.image_shape,
            "unet_config": self.model.config,
        }
        manifest.update({f"train_{k}": v for k, v in self.train_meta.items()})
        write_kv(directory / "manifest.txt", manifest)
        return directory

    @classmethod
    def load(cls, directory) -> "DenoiserCheckpoint":
        directory = Path(directory)
        manifest = read_kv(directory / "manifest.txt")
        version = parse_literal(manifest.get("format_version", "0"))
        if version != FORMAT_VERSION:
            raise ValueError(
                f"checkpoint format version {version} != supported {FORMAT_VERSION}"
            )
        with np.load(directory / "weights.npz") as blob:
            betas = blob["schedule/betas"]
            raw = {k[len("raw/"):]: torch.from_numpy(blob[k])
                   for k in blob.files if k.startswith("raw/")}
            ema = {k[len("ema/"):]: torch.from_numpy(blob[k])
                   for k in blob.files if k.startswith("ema/")}
        schedule = DiffusionSchedule(T=len(betas), betas=betas)
        model = UNet(**parse_literal(manifest["unet_config"]))
        model.load_state_dict(raw)
        train_meta = {
            k[len("train_"):]: parse_literal(v)
            for k, v in manifest.items() if k.startswith("train_")
        }
        return cls(
            model=model,
            ema_state=ema,
            schedule=schedule,
            image_shape=parse_literal(manifest["image_shape"]),
            train_meta=train_meta,
        )
