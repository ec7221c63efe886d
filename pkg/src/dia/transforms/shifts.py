"""Shifting transformations: fixed, deterministic maps that push an image
out of the training distribution. The first entry is always the identity."""

from dataclasses import dataclass, field

import numpy as np

ROTATE_COUNTS = {1: [0], 2: [0, 2], 4: [0, 1, 2, 3]}

# 2x2-tile jigsaw permutations (row-major tile order), identity first.
TILE_PERMUTATIONS = [
    (0, 1, 2, 3),
    (1, 0, 3, 2),
    (2, 3, 0, 1),
    (3, 2, 1, 0),
    (1, 2, 3, 0),
    (3, 0, 1, 2),
    (0, 2, 1, 3),
    (2, 0, 3, 1),
]


def _rot(x: np.ndarray, quarter_turns: int) -> np.ndarray:
    return np.rot90(x, k=quarter_turns, axes=(1, 2))


def _permute_tiles(x: np.ndarray, perm) -> np.ndarray:
    c, h, w = x.shape
    hh, ww = h // 2, w // 2
    tiles = [x[:, :hh, :ww], x[:, :hh, ww:], x[:, hh:, :ww], x[:, hh:, ww:]]
    out = np.empty_like(x)
    slots = [
        (slice(None), slice(0, hh), slice(0, ww)),
        (slice(None), slice(0, hh), slice(ww, w)),
        (slice(None), slice(hh, h), slice(0, ww)),
        (slice(None), slice(hh, h), slice(ww, w)),
    ]
    for slot, src in zip(slots, perm):
        out[slot] = tiles[src]
    return out


def _invert_perm(perm):
    inv = [0] * len(perm)
    for slot, src in enumerate(perm):
        inv[src] = slot
    return tuple(inv)


@dataclass
class ShiftSet:
    """K fixed bijective image maps, identity first."""

    kind: str
    K: int
    transforms: list = field(repr=False)
    inverses: list = field(repr=False)

    def apply(self, x: np.ndarray, k: int) -> np.ndarray:
        return self.transforms[k](x)

    def invert(self, x: np.ndarray, k: int) -> np.ndarray:
        return self.inverses[k](x)


def make_shift_set(kind: str, K: int) -> ShiftSet:
    if K < 1:
        raise ValueError(f"K must be >= 1, got {K}")
    if kind == "rotate":
        if K not in ROTATE_COUNTS:
            raise ValueError(f"rotate supports K in {{1, 2, 4}}, got {K}")
        turns = ROTATE_COUNTS[K]
        transforms = [
            (lambda x, q=q: np.ascontiguousarray(_rot(x, q))) for q in turns
        ]
        inverses = [
            (lambda x, q=q: np.ascontiguousarray(_rot(x, -q))) for q in turns
        ]
    elif kind == "perm":
        if K > len(TILE_PERMUTATIONS):
            raise ValueError(
                f"perm supports K <= {len(TILE_PERMUTATIONS)}, got {K}"
            )
        perms = TILE_PERMUTATIONS[:K]
        transforms = [(lambda x, p=p: _permute_tiles(x, p)) for p in perms]
        inverses = [
            (lambda x, p=_invert_perm(p): _permute_tiles(x, p)) for p in perms
        ]
    else:
        raise ValueError(f"unsupported shift kind: {kind!r}")
    return ShiftSet(kind=kind, K=K, transforms=transforms, inverses=inverses)
