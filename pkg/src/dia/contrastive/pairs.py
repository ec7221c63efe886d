"""Pair-label matrix over all view pairs in a batch.

Row layout: [plain branch O (K*B rows), second plain branch O' (K*B rows),
dissolved branch A (K*B rows)], each ordered by shift index then image
index. Entries are NEG / POS / EXCL; design "b" additionally excludes the
dissolved-vs-plain pairs that share both shift and source image.
"""

from dataclasses import dataclass

import numpy as np

NEG = 0
POS = 1
EXCL = 2

_CHAR = {NEG: "N", POS: "P", EXCL: "E"}
_LABEL = {v: k for k, v in _CHAR.items()}


@dataclass
class PairLabelMatrix:
    B: int
    K: int
    design: str
    n_branches: int
    labels: np.ndarray  # (size, size) int8

    @property
    def size(self) -> int:
        return self.n_branches * self.K * self.B

    def to_text(self) -> str:
        return "\n".join(
            "".join(_CHAR[v] for v in row) for row in self.labels
        )

    @staticmethod
    def labels_from_text(text: str) -> np.ndarray:
        rows = [line.strip() for line in text.strip().splitlines()]
        return np.array(
            [[_LABEL[ch] for ch in row] for row in rows], dtype=np.int8
        )


def build_pair_labels(
    B: int, K: int, design: str = "a", n_branches: int = 3
) -> PairLabelMatrix:
    """Label every ordered view pair as positive, negative, or excluded.

    Positives are exactly the O/O' pairs sharing shift and source image.
    n_branches=2 drops the dissolved branch (the plain contrastive setup).
    """
    if B < 1 or K < 1:
        raise ValueError(f"B and K must be >= 1, got ({B}, {K})")
    if design not in ("a", "b"):
        raise ValueError(f"design must be 'a' or 'b', got {design!r}")
    if n_branches not in (2, 3):
        raise ValueError(f"n_branches must be 2 or 3, got {n_branches}")

    kb = K * B
    size = n_branches * kb
    labels = np.full((size, size), NEG, dtype=np.int8)
    np.fill_diagonal(labels, EXCL)

    idx = np.arange(kb)
    labels[idx, kb + idx] = POS
    labels[kb + idx, idx] = POS

    if design == "b" and n_branches == 3:
        for plain in (idx, kb + idx):
            labels[2 * kb + idx, plain] = EXCL
            labels[plain, 2 * kb + idx] = EXCL

    return PairLabelMatrix(
        B=B, K=K, design=design, n_branches=n_branches, labels=labels
    )
