"""Denoiser training loop: EMA oracle, loss arithmetic, checkpoint format."""

import numpy as np
import pytest
import torch

from dia.diffusion.checkpoint import DenoiserCheckpoint
from dia.diffusion.ema import EmaTracker
from dia.diffusion.train import DiffusionTrainConfig, mean_abs_error, train_denoiser

TINY = DiffusionTrainConfig(
    steps=40, batch_size=4, T=50, base_width=8, channel_mults=(1, 2),
    blocks_per_level=1, attention=False,
)


def tiny_dataset(rng, n=12, side=8):
    return rng.random((n, 1, side, side)).astype(np.float32)


def test_mean_abs_error_oracle():
    assert mean_abs_error([0.1, 0.3], [0.2, 0.1]) == pytest.approx(0.15, abs=1e-12)


def test_ema_matches_scalar_loop_oracle(rng):
    model = torch.nn.Linear(1, 1, bias=False).double()
    with torch.no_grad():
        model.weight.fill_(0.5)
    decay = 0.9
    ema = EmaTracker(model, decay)
    shadow = 0.5
    for _ in range(25):
        w = float(rng.standard_normal())
        with torch.no_grad():
            model.weight.fill_(w)
        ema.update(model)
        shadow = decay * shadow + (1 - decay) * w
    assert float(ema.state_dict()["weight"]) == pytest.approx(shadow, abs=1e-10)


def test_ema_closed_form_power_decay():
    model = torch.nn.Linear(1, 1, bias=False).double()
    with torch.no_grad():
        model.weight.fill_(1.0)
    decay = 0.995
    ema = EmaTracker(model, decay)
    with torch.no_grad():
        model.weight.fill_(0.0)
    for _ in range(10):
        ema.update(model)
    assert float(ema.state_dict()["weight"]) == pytest.approx(decay ** 10, abs=1e-10)


def test_invalid_decay_rejected():
    with pytest.raises(ValueError):
        EmaTracker(torch.nn.Linear(1, 1), 1.0)


def test_training_reduces_running_loss(rng):
    ckpt = train_denoiser(tiny_dataset(rng), TINY, seed=0)
    assert ckpt.train_meta["final_running_loss"] < ckpt.train_meta["first_loss"]


def test_training_is_seed_deterministic(rng):
    data = tiny_dataset(rng)
    a = train_denoiser(data, TINY, seed=3)
    b = train_denoiser(data, TINY, seed=3)
    for (ka, va), (kb, vb) in zip(
        sorted(a.model.state_dict().items()), sorted(b.model.state_dict().items())
    ):
        assert ka == kb
        assert torch.equal(va, vb)


def test_predict_eps_shapes(rng):
    ckpt = train_denoiser(tiny_dataset(rng), TINY, seed=0)
    x = rng.standard_normal((3, 1, 8, 8)).astype(np.float32)
    t = np.array([1, 10, 50])
    for use_ema in (True, False):
        eps = ckpt.predict_eps(x, t, use_ema=use_ema)
        assert eps.shape == x.shape
        assert np.isfinite(eps).all()


def test_checkpoint_roundtrip_bytes(tmp_path, rng):
    ckpt = train_denoiser(tiny_dataset(rng), TINY, seed=1)
    first = tmp_path / "first"
    second = tmp_path / "second"
    ckpt.save(first)
    reloaded = DenoiserCheckpoint.load(first)
    reloaded.save(second)
    assert (first / "weights.npz").read_bytes() == (second / "weights.npz").read_bytes()
    assert (first / "manifest.txt").read_bytes() == (second / "manifest.txt").read_bytes()
    x = rng.standard_normal((2, 1, 8, 8)).astype(np.float32)
    np.testing.assert_allclose(
        ckpt.predict_eps(x, np.array([5, 7])),
        reloaded.predict_eps(x, np.array([5, 7])),
        atol=1e-6,
    )


def test_checkpoint_version_mismatch_rejected(tmp_path, rng):
    ckpt = train_denoiser(tiny_dataset(rng), TINY, seed=1)
    path = tmp_path / "ckpt"
    ckpt.save(path)
    manifest = path / "manifest.txt"
    text = manifest.read_text().replace(
        "format_version = 1", "format_version = 99"
    )
    manifest.write_text(text)
    with pytest.raises(ValueError, match="version"):
        DenoiserCheckpoint.load(path)


def test_schedule_embedded_in_checkpoint(tmp_path, rng):
    ckpt = train_denoiser(tiny_dataset(rng), TINY, seed=0)
    path = tmp_path / "ckpt"
    ckpt.save(path)
    reloaded = DenoiserCheckpoint.load(path)
    assert reloaded.schedule.T == TINY.T
    np.testing.assert_allclose(reloaded.schedule.betas, ckpt.schedule.betas)


def test_empty_dataset_rejected():
    with pytest.raises(ValueError):
        train_denoiser(np.zeros((0, 1, 8, 8), dtype=np.float32), TINY, seed=0)
