"""Per-shift feature banks, balancing terms, and the ensembled anomaly score.

Test-time views are the deterministic shifted images only; no stochastic
augmentation and no dissolving at inference.
"""

from dataclasses import dataclass

import numpy as np

from ..contrastive.encoder import EncoderCheckpoint
from ..transforms.shifts import ShiftSet


@dataclass
class FeatureBank:
    banks: np.ndarray     # (K, M, D) projection embeddings of shifted train images
    sum_con: np.ndarray   # (K,) sum of training similarity scores
    sum_cls: np.ndarray   # (K,) sum of training shift logits

    @property
    def K(self) -> int:
        return self.banks.shape[0]

    @property
    def M(self) -> int:
        return self.banks.shape[1]


@dataclass
class BalancingTerms:
    lambda_con: np.ndarray  # (K,)
    lambda_cls: np.ndarray  # (K,)


def score_con(query_z: np.ndarray, bank_k: np.ndarray) -> float:
    """Nearest-neighbor cosine similarity times the query embedding norm."""
    if bank_k.shape[0] == 0:
        raise ValueError("empty feature bank")
    return float(score_con_batch(query_z[None], bank_k)[0])


def score_con_batch(queries: np.ndarray, bank_k: np.ndarray) -> np.ndarray:
    if bank_k.shape[0] == 0:
        raise ValueError("empty feature bank")
    qn = np.linalg.norm(queries, axis=1)
    bank_unit = bank_k / np.maximum(
        np.linalg.norm(bank_k, axis=1, keepdims=True), 1e-12
    )
    cos = (queries / np.maximum(qn[:, None], 1e-12)) @ bank_unit.T
    return cos.max(axis=1) * qn


def score_cls(logits_row: np.ndarray, k: int) -> float:
    """Raw shift-classifier logit for class k (not a probability)."""
    if not 0 <= k < len(logits_row):
        raise ValueError(f"shift index {k} outside [0, {len(logits_row)})")
    return float(logits_row[k])


def build_feature_bank(
    checkpoint: EncoderCheckpoint, train_images, shifts: ShiftSet
) -> FeatureBank:
    """Embed every training image under every shift (deterministic views
    only) and accumulate the per-shift score sums used for balancing."""
    images = np.asarray(
        getattr(train_images, "images", train_images), dtype=np.float32
    )
    if images.shape[0] == 0:
        raise ValueError("empty training set")
    banks, sums_con, sums_cls = [], [], []
    for k in range(shifts.K):
        shifted = np.stack([shifts.apply(x, k) for x in images])
        z, logits = checkpoint.forward_numpy(shifted)
        s_con = score_con_batch(z, z)
        banks.append(z)
        sums_con.append(s_con.sum())
        sums_cls.append(logits[:, k].sum())
    return FeatureBank(
        banks=np.stack(banks),
        sum_con=np.array(sums_con, dtype=np.float64),
        sum_cls=np.array(sums_cls, dtype=np.float64),
    )


def balancing_terms(bank: FeatureBank) -> BalancingTerms:
    """lambda = M / sum of training scores, per shift and per component."""
    if np.any(bank.sum_con <= 0) or np.any(bank.sum_cls <= 0):
        raise ValueError(
            "non-positive training score sum; the bank is degenerate"
        )
    return BalancingTerms(
        lambda_con=bank.M / bank.sum_con,
        lambda_cls=bank.M / bank.sum_cls,
    )


def anomaly_score_components(
    images, checkpoint: EncoderCheckpoint, bank: FeatureBank, shifts: ShiftSet
):
    """Per-image, per-shift (s_con, s_cls) arrays of shape (n, K)."""
    images = np.asarray(
        getattr(images, "images", images), dtype=np.float32
    )
    n = images.shape[0]
    s_con = np.empty((n, shifts.K), dtype=np.float64)
    s_cls = np.empty((n, shifts.K), dtype=np.float64)
    for k in range(shifts.K):
        shifted = np.stack([shifts.apply(x, k) for x in images])
        z, logits = checkpoint.forward_numpy(shifted)
        s_con[:, k] = score_con_batch(z, bank.banks[k])
        s_cls[:, k] = logits[:, k]
    return s_con, s_cls


def anomaly_score(
    images,
    checkpoint: EncoderCheckpoint,
    bank: FeatureBank,
    lambdas: BalancingTerms,
    shifts: ShiftSet,
) -> np.ndarray:
    """Shift-ensembled anomaly score, higher = more anomalous.

    The balanced sum over shifts of s_con*lambda_con[k] + s_cls*lambda_cls[k]
    measures agreement with the training bank and shift classifier (high for
    normal data); the anomaly score is its negation.
    """
    s_con, s_cls = anomaly_score_components(images, checkpoint, bank, shifts)
    return -combine_scores(s_con, s_cls, lambdas)


def combine_scores(s_con, s_cls, lambdas: BalancingTerms) -> np.ndarray:
    """Balanced normality score: per-shift scaled components summed over
    shifts (unit mean per component on the training set)."""
    return (s_con * lambdas.lambda_con + s_cls * lambdas.lambda_cls).sum(axis=1)
