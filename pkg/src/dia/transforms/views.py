"""Composition of the three augmentation branches into a view batch.

Row layout matches the pair-label matrix: the two plain branches then the
dissolved branch, each ordered by shift index first, image index second.
"""

from dataclasses import dataclass

import numpy as np

from ..images import as_array
from .dissolve import DissolveConfig
from .nonshift import NonShiftConfig, apply_nonshift, sample_nonshift_spec
from .shifts import ShiftSet

BRANCH_TAGS = ("O", "O'", "A")


@dataclass
class ViewBatch:
    views: np.ndarray          # (n_branches*K*B, C, H, W)
    shift_index: np.ndarray    # per-view int in [0, K)
    branch_tag: np.ndarray     # per-view "O" / "O'" / "A"
    dissolve_t: np.ndarray     # per-view timestep, -1 outside the A branch

    def __len__(self):
        return self.views.shape[0]


def compose_views(
    batch,
    shifts: ShiftSet,
    dissolver=None,
    dissolve_cfg: DissolveConfig = None,
    rng: np.random.Generator = None,
    nonshift_cfg: NonShiftConfig = None,
    include_dissolved: bool = True,
) -> ViewBatch:
    """Produce the 3K*B views (2K*B when the dissolved branch is disabled).

    For the dissolved branch the order is: dissolve the original image at
    the dissolving resolution, then shift, then the random non-shifting
    augmentations. Each dissolved view draws its own timestep uniformly from
    [t_low, t_high].
    """
    images = as_array(batch)
    if images.shape[0] < 1:
        raise ValueError("batch must contain at least one image")
    if rng is None:
        rng = np.random.default_rng()
    if nonshift_cfg is None:
        nonshift_cfg = NonShiftConfig()
    b, c, h, w = images.shape
    k = shifts.K

    views, shift_idx, tags, tvals = [], [], [], []

    for tag in ("O", "O'"):
        for ki in range(k):
            for bi in range(b):
                spec = sample_nonshift_spec(rng, h, w, nonshift_cfg)
                views.append(apply_nonshift(shifts.apply(images[bi], ki), spec))
                shift_idx.append(ki)
                tags.append(tag)
                tvals.append(-1)

    if include_dissolved:
        if dissolver is None or dissolve_cfg is None:
            raise ValueError(
                "dissolver and dissolve_cfg required unless the dissolved "
                "branch is disabled"
            )
        t = rng.integers(dissolve_cfg.t_low, dissolve_cfg.t_high + 1, size=k * b)
        flat = np.concatenate([images] * k, axis=0)
        dissolved = dissolver(flat, t)
        for ki in range(k):
            for bi in range(b):
                spec = sample_nonshift_spec(rng, h, w, nonshift_cfg)
                view = apply_nonshift(
                    shifts.apply(dissolved[ki * b + bi], ki), spec
                )
                views.append(view)
                shift_idx.append(ki)
                tags.append("A")
                tvals.append(int(t[ki * b + bi]))

    return ViewBatch(
        views=np.stack(views).astype(np.float32),
        shift_index=np.array(shift_idx, dtype=np.int64),
        branch_tag=np.array(tags),
        dissolve_t=np.array(tvals, dtype=np.int64),
    )
