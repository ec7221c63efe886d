"""Fine-grained anomaly detection with dissolving transformations.

Pipeline: a small diffusion denoiser provides the dissolving transformation
(a single reverse step applied to a clean image), a residual encoder is
trained with a fine-grained contrastive objective over shifted, augmented,
and dissolved views, and test images are scored against per-shift feature
banks.
"""

__version__ = "0.1.0"

from . import contrastive, datasets, diffusion, harness, kernels, scoring, transforms
from .images import ImageBatch

__all__ = [
    "ImageBatch",
    "contrastive",
    "datasets",
    "diffusion",
    "harness",
    "kernels",
    "scoring",
    "transforms",
]
