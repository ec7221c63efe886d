"""Dataset loading, label remapping, contamination controls, and a synthetic
fine-grained benchmark for desk-scale verification.

Canonical pixel domain at the dataset boundary is [0,1] float32, shape
(N, C, H, W). Train splits hold only normal data unless contamination is
requested explicitly.
"""

import hashlib
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from PIL import Image

IMAGE_EXTENSIONS = (".png", ".jpg", ".jpeg", ".bmp", ".tif", ".tiff")


def _fingerprint(images: np.ndarray, labels: np.ndarray) -> str:
    h = hashlib.sha256()
    h.update(np.ascontiguousarray(images).tobytes())
    h.update(np.ascontiguousarray(labels).tobytes())
    h.update(str(images.shape).encode())
    return h.hexdigest()[:16]


@dataclass
class ImageDataset:
    images: np.ndarray   # (N, C, H, W) float32 in [0,1]
    labels: np.ndarray   # (N,) int, 0 normal / 1 anomalous
    split: str           # "train" or "test"
    fingerprint: str = ""
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.images = np.asarray(self.images, dtype=np.float32)
        self.labels = np.asarray(self.labels, dtype=np.int64)
        if self.images.ndim != 4:
            raise ValueError(f"expected (N,C,H,W) images, got {self.images.shape}")
        if len(self.labels) != len(self.images):
            raise ValueError("image/label count mismatch")
        if self.split not in ("train", "test"):
            raise ValueError(f"split must be 'train' or 'test', got {self.split!r}")
        if self.images.size and (self.images.min() < -1e-6 or self.images.max() > 1 + 1e-6):
            raise ValueError("pixel values must lie in [0,1]")
        if np.any((self.labels != 0) & (self.labels != 1)):
            raise ValueError("labels must be binary 0/1")
        contaminated = self.metadata.get("contamination_ratio", 0)
        if self.split == "train" and not contaminated and np.any(self.labels != 0):
            raise ValueError(
                "train split contains anomalous items without an explicit "
                "contamination ratio"
            )
        if not self.fingerprint:
            self.fingerprint = _fingerprint(self.images, self.labels)

    def __len__(self) -> int:
        return len(self.images)

    @property
    def image_shape(self):
        return tuple(self.images.shape[1:])


def _load_image_file(path: Path) -> np.ndarray:
    try:
        with Image.open(path) as img:
            if img.mode not in ("L", "RGB"):
                img = img.convert("RGB") if len(img.getbands()) >= 3 else img.convert("L")
            arr = np.asarray(img, dtype=np.float32) / 255.0
    except Exception as exc:
        raise ValueError(f"cannot decode image file {path}: {exc}") from exc
    if arr.ndim == 2:
        arr = arr[None]
    else:
        arr = arr.transpose(2, 0, 1)
    return arr


def load_folder_dataset(root, split: str) -> ImageDataset:
    """Read images from root/{train,test}/{normal,anomalous}/*.

    The train split reads normal/ only; a train-side anomalous/ directory with
    content is rejected to protect the semi-supervised protocol (use
    contaminate() for deliberate contamination). Files are ordered
    lexicographically so downstream artifacts are reproducible.
    """
    root = Path(root)
    split_dir = root / split
    if not split_dir.is_dir():
        raise FileNotFoundError(f"missing split directory: {split_dir}")
    normal_dir = split_dir / "normal"
    anom_dir = split_dir / "anomalous"
    if not normal_dir.is_dir():
        raise FileNotFoundError(f"missing directory: {normal_dir}")

    def list_images(d: Path):
        return sorted(
            p for p in d.iterdir() if p.suffix.lower() in IMAGE_EXTENSIONS
        )

    images, labels = [], []
    for p in list_images(normal_dir):
        images.append(_load_image_file(p))
        labels.append(0)
    if split == "train":
        if anom_dir.is_dir() and list_images(anom_dir):
            raise ValueError(
                f"anomalous images found under train split ({anom_dir}); "
                "training uses the normal class only"
            )
    else:
        if not anom_dir.is_dir():
            raise FileNotFoundError(f"missing directory: {anom_dir}")
        for p in list_images(anom_dir):
            images.append(_load_image_file(p))
            labels.append(1)
    if not images:
        raise ValueError(f"no images found under {split_dir}")
    shapes = {im.shape for im in images}
    if len(shapes) > 1:
        raise ValueError(f"images under {split_dir} have mixed shapes: {shapes}")
    return ImageDataset(
        images=np.stack(images),
        labels=np.array(labels),
        split=split,
        metadata={"source": str(root)},
    )


def load_npz_dataset(path, normal_label_set, split: str = "test",
                     image_key: str = "images", label_key: str = "labels") -> ImageDataset:
    """Load an npz archive of uint8 images plus integer labels and remap the
    labels to binary: classes in normal_label_set become 0, everything else 1.
    """
    with np.load(path) as archive:
        if image_key not in archive or label_key not in archive:
            raise KeyError(
                f"archive {path} missing '{image_key}' or '{label_key}'"
            )
        raw_images = archive[image_key]
        raw_labels = np.asarray(archive[label_key]).reshape(-1)
    if len(raw_images) != len(raw_labels):
        raise ValueError(
            f"image/label length mismatch: {len(raw_images)} vs {len(raw_labels)}"
        )
    normal = set(int(v) for v in normal_label_set)
    present = set(int(v) for v in np.unique(raw_labels))
    if not (normal & present):
        raise ValueError(
            f"normal_label_set {sorted(normal)} disjoint from labels {sorted(present)}"
        )
    images = np.asarray(raw_images, dtype=np.float32) / 255.0
    if images.ndim == 3:
        images = images[:, None]
    elif images.ndim == 4 and images.shape[-1] in (1, 3):
        images = images.transpose(0, 3, 1, 2)
    labels = np.array([0 if int(v) in normal else 1 for v in raw_labels])
    return ImageDataset(
        images=images, labels=labels, split=split,
        metadata={"source": str(path), "normal_label_set": sorted(normal)},
    )


@dataclass
class SynthConfig:
    n_normal: int = 200
    n_anomalous: int = 100
    side: int = 32
    speckle_density: float = 0.02
    speckle_amplitude: float = 0.8
    n_test_normal: int = 100
    grain_sigma: float = 0.04
    seed: int = 0

    def __post_init__(self):
        if self.n_normal < 1 or self.n_anomalous < 1 or self.n_test_normal < 1:
            raise ValueError("counts must be >= 1")
        if not 0 <= self.speckle_amplitude <= 1:
            raise ValueError("speckle_amplitude must lie in [0,1]")
        if not 0 < self.speckle_density < 1:
            raise ValueError("speckle_density must lie in (0,1)")
        if self.grain_sigma < 0:
            raise ValueError("grain_sigma must be >= 0")


def _smooth_blobs(rng: np.random.Generator, n: int, side: int,
                  grain_sigma: float = 0.0) -> np.ndarray:
    """Smooth low-frequency images from a coarse random grid upsampled with a
    cosine ramp, normalized per-image to [0.1, 0.9], plus an optional
    fine-grained gaussian grain layer. The grain gives the normal class its
    own fine detail, so removing fine detail is a meaningful transformation
    on normal data."""
    coarse_side = max(side // 8, 2)
    coarse = rng.random((n, coarse_side, coarse_side)).astype(np.float64)
    # separable cosine-weighted upsampling to the full resolution
    pos = (np.arange(side) + 0.5) / side * coarse_side - 0.5
    lo = np.clip(np.floor(pos).astype(int), 0, coarse_side - 1)
    hi = np.clip(lo + 1, 0, coarse_side - 1)
    frac = np.clip(pos - lo, 0.0, 1.0)
    w = 0.5 - 0.5 * np.cos(np.pi * frac)
    rows = coarse[:, lo, :] * (1 - w)[None, :, None] + coarse[:, hi, :] * w[None, :, None]
    imgs = rows[:, :, lo] * (1 - w)[None, None, :] + rows[:, :, hi] * w[None, None, :]
    mins = imgs.min(axis=(1, 2), keepdims=True)
    maxs = imgs.max(axis=(1, 2), keepdims=True)
    imgs = 0.1 + 0.8 * (imgs - mins) / np.maximum(maxs - mins, 1e-9)
    if grain_sigma > 0:
        imgs = np.clip(imgs + rng.normal(0.0, grain_sigma, imgs.shape), 0.0, 1.0)
    return imgs.astype(np.float32)[:, None]


def _add_speckle(rng: np.random.Generator, images: np.ndarray,
                 density: float, amplitude: float) -> np.ndarray:
    out = images.copy()
    n, _, h, w = out.shape
    mask = rng.random((n, 1, h, w)) < density
    signs = np.where(rng.random((n, 1, h, w)) < 0.5, -1.0, 1.0)
    out = np.where(mask, out + signs * amplitude, out)
    return np.clip(out, 0.0, 1.0).astype(np.float32)


def synth_finegrained(config: SynthConfig = SynthConfig()):
    """Synthetic fine-grained benchmark: normal images are smooth random
    blobs; anomalous images are the same blobs plus sparse high-amplitude
    speckle. Returns (train, test) ImageDatasets, reproducible from seed.
    """
    rng = np.random.default_rng(config.seed)
    train_images = _smooth_blobs(rng, config.n_normal, config.side,
                                 config.grain_sigma)
    test_normal = _smooth_blobs(rng, config.n_test_normal, config.side,
                                config.grain_sigma)
    anom_base = _smooth_blobs(rng, config.n_anomalous, config.side,
                              config.grain_sigma)
    anom = _add_speckle(rng, anom_base, config.speckle_density, config.speckle_amplitude)
    train = ImageDataset(
        images=train_images,
        labels=np.zeros(config.n_normal, dtype=np.int64),
        split="train",
        metadata={"source": "synth_finegrained", "seed": config.seed},
    )
    test = ImageDataset(
        images=np.concatenate([test_normal, anom]),
        labels=np.concatenate([
            np.zeros(config.n_test_normal, dtype=np.int64),
            np.ones(config.n_anomalous, dtype=np.int64),
        ]),
        split="test",
        metadata={"source": "synth_finegrained", "seed": config.seed},
    )
    return train, test


def contaminate(train: ImageDataset, anomalous_pool: np.ndarray,
                ratio: float, seed: int = 0) -> ImageDataset:
    """Insert anomalous items so they make up `ratio` of the returned train
    split: floor(ratio*N/(1-ratio)) items drawn without replacement."""
    if not 0 <= ratio < 1:
        raise ValueError(f"ratio must lie in [0,1), got {ratio}")
    if ratio == 0:
        return train
    pool = np.asarray(getattr(anomalous_pool, "images", anomalous_pool), dtype=np.float32)
    n = len(train)
    n_insert = int(np.floor(ratio * n / (1.0 - ratio)))
    if n_insert > len(pool):
        raise ValueError(
            f"need {n_insert} anomalous items but pool holds {len(pool)}"
        )
    rng = np.random.default_rng(seed)
    picks = rng.choice(len(pool), size=n_insert, replace=False)
    images = np.concatenate([train.images, pool[picks]])
    labels = np.concatenate([train.labels, np.ones(n_insert, dtype=np.int64)])
    meta = dict(train.metadata)
    meta["contamination_ratio"] = ratio
    meta["n_contaminant"] = n_insert
    return ImageDataset(images=images, labels=labels, split="train",
                        fingerprint="", metadata=meta)


def subsample_fraction(dataset: ImageDataset, gamma: float, seed: int = 0) -> ImageDataset:
    """Seeded uniform subsample without replacement keeping a gamma fraction."""
    if not 0 < gamma <= 1:
        raise ValueError(f"gamma must lie in (0,1], got {gamma}")
    if gamma == 1:
        return dataset
    n_keep = int(round(gamma * len(dataset)))
    if n_keep < 1:
        raise ValueError(f"gamma={gamma} leaves an empty dataset")
    rng = np.random.default_rng(seed)
    picks = np.sort(rng.choice(len(dataset), size=n_keep, replace=False))
    meta = dict(dataset.metadata)
    meta["subsample_gamma"] = gamma
    return ImageDataset(
        images=dataset.images[picks], labels=dataset.labels[picks],
        split=dataset.split, fingerprint="", metadata=meta,
    )
