from .checkpoint import DenoiserCheckpoint
from .ops import (
    dissolve,
    dissolve_from_eps,
    q_sample,
    reverse_step,
    reverse_step_from_eps,
)
from .schedule import DiffusionSchedule, build_schedule
from .train import DiffusionTrainConfig, mean_abs_error, train_denoiser
from .unet import UNet

__all__ = [
    "DenoiserCheckpoint",
    "DiffusionSchedule",
    "DiffusionTrainConfig",
    "UNet",
    "build_schedule",
    "dissolve",
    "dissolve_from_eps",
    "mean_abs_error",
    "q_sample",
    "reverse_step",
    "reverse_step_from_eps",
    "train_denoiser",
]
