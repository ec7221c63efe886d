"""Training losses: fine-grained NT-Xent, shift classification, and their
weighted sum.

The temperature divides the cosine similarity inside the exponent in both
numerator and denominator (the standard NT-Xent form). Excluded pairs are
removed from the denominator sums as well as from the positive set.
"""

import numpy as np
import torch
import torch.nn.functional as F

from .pairs import EXCL, POS, PairLabelMatrix


def _label_tensor(labels) -> torch.Tensor:
    if isinstance(labels, PairLabelMatrix):
        labels = labels.labels
    if isinstance(labels, np.ndarray):
        labels = torch.from_numpy(np.ascontiguousarray(labels))
    return labels.long()


def fine_ntxent_loss(z: torch.Tensor, labels, tau: float) -> torch.Tensor:
    """Mean contrastive loss over positive pairs, scaled by 1/size.

    For a positive pair (i, j):
        l_ij = -log( exp(sim_ij / tau) / sum_{k not excluded for i} exp(sim_ik / tau) )
    and the result is sum(l_ij) / (size * n_pos).
    """
    if tau <= 0:
        raise ValueError(f"tau must be positive, got {tau}")
    lab = _label_tensor(labels)
    n = z.shape[0]
    if lab.shape != (n, n):
        raise ValueError(f"label matrix {tuple(lab.shape)} != ({n}, {n})")
    if not torch.isfinite(z).all():
        raise ValueError("embeddings contain non-finite values")
    norms = z.norm(dim=1)
    if (norms == 0).any():
        raise ValueError("zero-norm embedding row")

    zn = z / norms[:, None]
    logits = (zn @ zn.T) / tau

    allowed = lab != EXCL
    # subtract per-row max over allowed entries for numerical stability
    shift = torch.where(allowed, logits, logits.new_tensor(float("-inf")))
    shift = shift.max(dim=1, keepdim=True).values.detach()
    exp = torch.exp(logits - shift) * allowed
    log_denom = torch.log(exp.sum(dim=1)) + shift[:, 0]

    pos = lab == POS
    n_pos = int(pos.sum())
    if n_pos == 0:
        raise ValueError("label matrix contains no positive pairs")
    pair_losses = (log_denom[:, None] - logits)[pos]
    return pair_losses.sum() / (n * n_pos)


def shift_cls_loss(logits: torch.Tensor, shift_targets) -> torch.Tensor:
    """Mean softmax cross-entropy of the shift classifier over all views."""
    if isinstance(shift_targets, np.ndarray):
        shift_targets = torch.from_numpy(shift_targets)
    shift_targets = shift_targets.long()
    k = logits.shape[1]
    if ((shift_targets < 0) | (shift_targets >= k)).any():
        raise ValueError(f"shift targets outside [0, {k})")
    return F.cross_entropy(logits, shift_targets)


def dia_loss(z, logits, labels, shift_targets, tau: float,
             gamma_cls: float = 1.0) -> torch.Tensor:
    """Total objective: contrastive loss plus gamma times the shift loss."""
    if gamma_cls < 0:
        raise ValueError(f"gamma_cls must be >= 0, got {gamma_cls}")
    con = fine_ntxent_loss(z, labels, tau)
    if gamma_cls == 0:
        return con
    return con + gamma_cls * shift_cls_loss(logits, shift_targets)
