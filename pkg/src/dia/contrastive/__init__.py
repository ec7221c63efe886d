from dataclasses import dataclass

from .encoder import DiaEncoder, EmbeddingBatch, EncoderCheckpoint, encode
from .losses import dia_loss, fine_ntxent_loss, shift_cls_loss
from .pairs import EXCL, NEG, POS, PairLabelMatrix, build_pair_labels


@dataclass
class ContrastiveConfig:
    tau: float = 0.5
    gamma_cls: float = 1.0
    matrix_design: str = "a"
    projection_dim: int = 128

    def __post_init__(self):
        if self.tau <= 0:
            raise ValueError(f"tau must be positive, got {self.tau}")
        if self.gamma_cls < 0:
            raise ValueError(f"gamma_cls must be >= 0, got {self.gamma_cls}")
        if self.matrix_design not in ("a", "b"):
            raise ValueError(f"matrix_design must be 'a' or 'b'")


__all__ = [
    "EXCL",
    "NEG",
    "POS",
    "ContrastiveConfig",
    "DiaEncoder",
    "EmbeddingBatch",
    "EncoderCheckpoint",
    "PairLabelMatrix",
    "build_pair_labels",
    "dia_loss",
    "encode",
    "fine_ntxent_loss",
    "shift_cls_loss",
]
