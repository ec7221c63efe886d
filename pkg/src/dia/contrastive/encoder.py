"""Residual encoder with a projection head and a shift-classification head."""

from dataclasses import dataclass
from pathlib import Path

import numpy as np
import torch
import torch.nn as nn
import torch.nn.functional as F

from ..io_utils import parse_literal, read_kv, write_kv

FORMAT_VERSION = 1


class BasicBlock(nn.Module):
    def __init__(self, in_ch, out_ch, stride=1):
        super().__init__()
        self.conv1 = nn.Conv2d(in_ch, out_ch, 3, stride=stride, padding=1, bias=False)
        self.bn1 = nn.BatchNorm2d(out_ch)
        self.conv2 = nn.Conv2d(out_ch, out_ch, 3, padding=1, bias=False)
        self.bn2 = nn.BatchNorm2d(out_ch)
        self.short = nn.Identity()
        if stride != 1 or in_ch != out_ch:
            self.short = nn.Sequential(
                nn.Conv2d(in_ch, out_ch, 1, stride=stride, bias=False),
                nn.BatchNorm2d(out_ch),
            )

    def forward(self, x):
        h = F.relu(self.bn1(self.conv1(x)))
        h = self.bn2(self.conv2(h))
        return F.relu(h + self.short(x))


class DiaEncoder(nn.Module):
    """18-layer residual backbone (small-image stem, no initial pooling),
    a 2-layer MLP projection, and a linear K-way shift classifier."""

    def __init__(self, in_channels=3, K=4, projection_dim=128, base_width=64):
        super().__init__()
        self.config = dict(
            in_channels=in_channels,
            K=K,
            projection_dim=projection_dim,
            base_width=base_width,
        )
        w = base_width
        self.stem = nn.Sequential(
            nn.Conv2d(in_channels, w, 3, padding=1, bias=False),
            nn.BatchNorm2d(w),
            nn.ReLU(inplace=True),
        )
        stages = []
        widths = [w, 2 * w, 4 * w, 8 * w]
        in_ch = w
        for i, out_ch in enumerate(widths):
            stride = 1 if i == 0 else 2
            stages += [BasicBlock(in_ch, out_ch, stride), BasicBlock(out_ch, out_ch)]
            in_ch = out_ch
        self.stages = nn.Sequential(*stages)
        feat_dim = widths[-1]
        self.projection = nn.Sequential(
            nn.Linear(feat_dim, feat_dim),
            nn.ReLU(inplace=True),
            nn.Linear(feat_dim, projection_dim),
        )
        self.classifier = nn.Linear(feat_dim, K)

    def features(self, x):
        h = self.stages(self.stem(x))
        return h.mean(dim=(2, 3))

    def forward(self, x):
        f = self.features(x)
        return self.projection(f), self.classifier(f)


@dataclass
class EmbeddingBatch:
    z: np.ndarray              # (n, D) projection outputs
    shift_targets: np.ndarray  # (n,)
    branch_tags: np.ndarray    # (n,)


class EncoderCheckpoint:
    """Trained encoder plus the transform metadata scoring depends on."""

    def __init__(self, model: DiaEncoder, meta: dict):
        self.model = model.eval()
        for p in self.model.parameters():
            p.requires_grad_(False)
        self.meta = dict(meta)

    @property
    def K(self) -> int:
        return self.model.config["K"]

    @torch.no_grad()
    def forward_numpy(self, images: np.ndarray, batch_size: int = 128):
        """Eval-mode projection and shift logits for (n, C, H, W) images."""
        self.model.eval()
        zs, ls = [], []
        for i in range(0, len(images), batch_size):
            x = torch.from_numpy(
                np.ascontiguousarray(images[i:i + batch_size], dtype=np.float32)
            )
            z, logits = self.model(x)
            zs.append(z.numpy())
            ls.append(logits.numpy())
        return np.concatenate(zs), np.concatenate(ls)

    def save(self, directory) -> Path:
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        arrays = {
            name: p.numpy()
            for name, p in sorted(self.model.state_dict().items())
        }
        np.savez(directory / "weights.npz", **arrays)
        manifest = {
            "format_version": FORMAT_VERSION,
            "encoder_config": self.model.config,
        }
        manifest.update({f"meta_{k}": v for k, v in self.meta.items()})
        write_kv(directory / "manifest.txt", manifest)
        return directory

    @classmethod
    def load(cls, directory) -> "EncoderCheckpoint":
        directory = Path(directory)
        manifest = read_kv(directory / "manifest.txt")
        version = parse_literal(manifest.get("format_version", "0"))
        if version != FORMAT_VERSION:
            raise ValueError(
                f"checkpoint format version {version} != supported {FORMAT_VERSION}"
            )
        model = DiaEncoder(**parse_literal(manifest["encoder_config"]))
        with np.load(directory / "weights.npz") as blob:
            state = {k: torch.from_numpy(blob[k]) for k in blob.files}
        model.load_state_dict(state)
        meta = {
            k[len("meta_"):]: parse_literal(v)
            for k, v in manifest.items() if k.startswith("meta_")
        }
        return cls(model=model, meta=meta)


def encode(checkpoint: EncoderCheckpoint, views):
    """Deterministic eval-mode encoding of a ViewBatch (or raw image array).

    Returns (EmbeddingBatch, logits).
    """
    images = getattr(views, "views", views)
    z, logits = checkpoint.forward_numpy(np.asarray(images, dtype=np.float32))
    emb = EmbeddingBatch(
        z=z,
        shift_targets=np.asarray(getattr(views, "shift_index", np.zeros(len(z), dtype=np.int64))),
        branch_tags=np.asarray(getattr(views, "branch_tag", np.array(["O"] * len(z)))),
    )
    return emb, logits
