"""Exponential moving average of model parameters."""

import torch


class EmaTracker:
    """Shadow copy updated as shadow = decay * shadow + (1 - decay) * param."""

    def __init__(self, model: torch.nn.Module, decay: float):
        if not (0.0 <= decay < 1.0):
            raise ValueError(f"decay must be in [0, 1), got {decay}")
        self.decay = decay
        self.shadow = {
            name: p.detach().clone() for name, p in model.state_dict().items()
        }

    @torch.no_grad()
    def update(self, model: torch.nn.Module) -> None:
        for name, p in model.state_dict().items():
            if p.dtype.is_floating_point:
                self.shadow[name].mul_(self.decay).add_(p, alpha=1.0 - self.decay)
            else:
                self.shadow[name].copy_(p)

    def state_dict(self) -> dict:
        return self.shadow

    def copy_to(self, model: torch.nn.Module) -> None:
        model.load_state_dict(self.shadow)
