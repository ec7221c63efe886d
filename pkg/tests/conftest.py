import numpy as np
import pytest
import torch


@pytest.fixture(autouse=True)
def _single_thread():
    torch.set_num_threads(1)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


class StubDenoiser:
    """Duck-typed denoiser returning a fixed epsilon prediction (zeros by
    default), for closed-form checks without a trained network."""

    def __init__(self, schedule, image_shape, eps=None):
        self.schedule = schedule
        self.image_shape = tuple(image_shape)
        self.eps = eps

    def predict_eps(self, x, t, use_ema=True):
        if self.eps is None:
            return np.zeros_like(np.asarray(x, dtype=np.float32))
        return np.asarray(self.eps, dtype=np.float32)


@pytest.fixture
def stub_denoiser_factory():
    return StubDenoiser
