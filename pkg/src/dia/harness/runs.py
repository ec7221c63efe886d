"""Experiment orchestration: dataset resolution, DIA training, evaluation."""

import copy

import numpy as np
import torch

from ..contrastive.encoder import DiaEncoder, EncoderCheckpoint
from ..contrastive.losses import dia_loss
from ..contrastive.pairs import build_pair_labels
from ..datasets import (
    ImageDataset,
    SynthConfig,
    contaminate,
    load_folder_dataset,
    load_npz_dataset,
    subsample_fraction,
    synth_finegrained,
)
from ..scoring import (
    ScoreReport,
    anomaly_score_components,
    auroc,
    balancing_terms,
    build_feature_bank,
    combine_scores,
)
from ..transforms.dissolve import DissolveConfig, build_dissolver
from ..transforms.nonshift import NonShiftConfig
from ..transforms.shifts import make_shift_set
from ..transforms.views import compose_views
from .config import ExperimentConfig
from .optim import build_optimizer


def resolve_datasets(config: ExperimentConfig):
    """Materialize (train, test) ImageDatasets from the config's dataset
    section, applying subsampling and contamination when requested."""
    if config.dataset_kind == "synth":
        train, test = synth_finegrained(SynthConfig(
            n_normal=config.synth_n_normal,
            n_anomalous=config.synth_n_anomalous,
            n_test_normal=config.synth_n_test_normal,
            side=config.synth_side,
            speckle_density=config.synth_density,
            speckle_amplitude=config.synth_amplitude,
            seed=config.seed,
        ))
    elif config.dataset_kind == "folder":
        train = load_folder_dataset(config.dataset_path, "train")
        test = load_folder_dataset(config.dataset_path, "test")
    else:
        train = load_npz_dataset(
            config.dataset_path, config.normal_labels, split="test"
        )
        # npz archives carry one pool; normal items train, the full set tests
        normal = train.images[train.labels == 0]
        test = train
        train = ImageDataset(
            images=normal,
            labels=np.zeros(len(normal), dtype=np.int64),
            split="train",
            metadata=dict(test.metadata),
        )
    if config.subsample_gamma < 1:
        train = subsample_fraction(train, config.subsample_gamma, config.seed)
    if config.contamination_ratio > 0:
        pool = test.images[test.labels == 1]
        train = contaminate(train, pool, config.contamination_ratio, config.seed)
    return train, test


def _build_dissolve(config: ExperimentConfig, denoiser):
    cfg = DissolveConfig(
        t_low=config.t_low,
        t_high=config.t_high,
        dissolve_resolution=config.dissolve_resolution,
        method=config.dissolve_method,
        kernel_size=config.kernel_size,
    )
    if cfg.method == "diffusion":
        if denoiser is None:
            raise ValueError(
                "dissolve_method=diffusion requires a denoiser checkpoint"
            )
        side = denoiser.image_shape[-1]
        if side != cfg.dissolve_resolution:
            raise ValueError(
                f"dissolve_resolution {cfg.dissolve_resolution} incompatible "
                f"with denoiser trained at {side}x{side}"
            )
        return cfg, build_dissolver(cfg, denoiser)
    return cfg, build_dissolver(cfg)


def train_dia(train_dataset, config: ExperimentConfig, denoiser=None):
    """Train the encoder with the composed-view objective.

    Per epoch: a seeded without-replacement draw of samples_per_epoch images,
    batches of dia_batch_size, cosine-annealed learning rate. The retained
    model is the one with the lowest epoch training loss (no validation data
    exists under the semi-supervised protocol).

    Returns (EncoderCheckpoint, per-epoch loss history).
    """
    images = np.asarray(train_dataset.images, dtype=np.float32)
    n, c, _, _ = images.shape
    torch.manual_seed(config.seed)
    rng = np.random.default_rng(config.seed)

    shifts = make_shift_set(config.shift_kind, config.n_shifts)
    s = config.aug_jitter_strength
    nonshift_cfg = NonShiftConfig(
        crop_scale=(config.aug_crop_scale_lo, 1.0),
        hflip_p=config.aug_hflip_p,
        jitter_p=config.aug_jitter_p,
        jitter_strength=(s, s, s, s / 4.0),
        grayscale_p=config.aug_grayscale_p,
    )
    if config.include_dissolved:
        dissolve_cfg, dissolver = _build_dissolve(config, denoiser)
        n_branches = 3
    else:
        dissolve_cfg, dissolver = None, None
        n_branches = 2

    model = DiaEncoder(
        in_channels=c,
        K=shifts.K,
        projection_dim=config.projection_dim,
        base_width=config.encoder_base_width,
    )
    opt = build_optimizer(model.parameters(), config.dia_optimizer, config.dia_lr)
    sched = torch.optim.lr_scheduler.CosineAnnealingLR(opt, T_max=config.dia_epochs)

    label_cache = {}

    def labels_for(b):
        if b not in label_cache:
            label_cache[b] = build_pair_labels(
                b, shifts.K, design=config.matrix_design, n_branches=n_branches
            )
        return label_cache[b]

    history = []
    best_loss = float("inf")
    best_state = None
    best_epoch = -1
    model.train()
    for epoch in range(config.dia_epochs):
        draw = rng.choice(n, size=min(config.dia_samples_per_epoch, n),
                          replace=False)
        epoch_losses = []
        for start in range(0, len(draw), config.dia_batch_size):
            idx = draw[start:start + config.dia_batch_size]
            views = compose_views(
                images[idx], shifts,
                dissolver=dissolver, dissolve_cfg=dissolve_cfg,
                rng=rng, nonshift_cfg=nonshift_cfg,
                include_dissolved=config.include_dissolved,
            )
            x = torch.from_numpy(views.views)
            z, logits = model(x)
            loss = dia_loss(
                z, logits, labels_for(len(idx)), views.shift_index,
                tau=config.tau, gamma_cls=config.gamma_cls,
            )
            opt.zero_grad()
            loss.backward()
            opt.step()
            epoch_losses.append(loss.item())
        sched.step()
        epoch_loss = float(np.mean(epoch_losses))
        history.append(epoch_loss)
        if epoch_loss < best_loss:
            best_loss = epoch_loss
            best_epoch = epoch
            best_state = copy.deepcopy(model.state_dict())

    model.load_state_dict(best_state)
    meta = {
        "seed": config.seed,
        "epochs": config.dia_epochs,
        "best_epoch": best_epoch,
        "best_loss": round(best_loss, 6),
        "shift_kind": config.shift_kind,
        "n_shifts": shifts.K,
        "tau": config.tau,
        "gamma_cls": config.gamma_cls,
        "matrix_design": config.matrix_design,
        "include_dissolved": config.include_dissolved,
        "dissolve_method": config.dissolve_method,
        "optimizer": config.dia_optimizer,
        "config_hash": config.config_hash(),
        "dataset_fingerprint": getattr(train_dataset, "fingerprint", None),
    }
    return EncoderCheckpoint(model=model, meta=meta), history


def evaluate(checkpoint: EncoderCheckpoint, train_dataset, test_dataset,
             config: ExperimentConfig) -> ScoreReport:
    """Bank + balancing terms from the train split, scored test split."""
    if len(np.unique(test_dataset.labels)) < 2:
        raise ValueError("test split must contain both classes")
    shifts = make_shift_set(config.shift_kind, config.n_shifts)
    bank = build_feature_bank(checkpoint, train_dataset.images, shifts)
    lambdas = balancing_terms(bank)
    s_con, s_cls = anomaly_score_components(
        test_dataset.images, checkpoint, bank, shifts
    )
    scores = -combine_scores(s_con, s_cls, lambdas)
    value = auroc(scores, test_dataset.labels)
    return ScoreReport(
        image_ids=[f"test_{i:05d}" for i in range(len(test_dataset))],
        labels=test_dataset.labels,
        s_con=s_con,
        s_cls=s_cls,
        scores=scores,
        auroc=value,
        metadata={
            "seed": config.seed,
            "config_hash": config.config_hash(),
            "train_fingerprint": train_dataset.fingerprint,
            "test_fingerprint": test_dataset.fingerprint,
        },
    )
