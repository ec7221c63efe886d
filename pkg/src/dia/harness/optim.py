"""Layer-wise adaptive rate scaling optimizer with a momentum-SGD fallback."""

import torch


class LARS(torch.optim.Optimizer):
    """SGD with momentum where each layer's step is rescaled by
    trust * ||w|| / (||grad|| + weight_decay * ||w||).

    Layers with zero weight or gradient norm fall back to the plain learning
    rate. Commonly used for large-batch contrastive training.
    """

    def __init__(self, params, lr, momentum=0.9, weight_decay=0.0,
                 trust_coefficient=1e-3, eps=1e-8):
        if lr <= 0:
            raise ValueError(f"lr must be positive, got {lr}")
        defaults = dict(lr=lr, momentum=momentum, weight_decay=weight_decay,
                        trust_coefficient=trust_coefficient, eps=eps)
        super().__init__(params, defaults)

    @torch.no_grad()
    def step(self, closure=None):
        loss = None
        if closure is not None:
            with torch.enable_grad():
                loss = closure()
        for group in self.param_groups:
            wd = group["weight_decay"]
            momentum = group["momentum"]
            trust = group["trust_coefficient"]
            eps = group["eps"]
            lr = group["lr"]
            for p in group["params"]:
                if p.grad is None:
                    continue
                grad = p.grad
                if wd != 0:
                    grad = grad.add(p, alpha=wd)
                w_norm = torch.norm(p)
                g_norm = torch.norm(grad)
                if w_norm > 0 and g_norm > 0:
                    local_lr = trust * w_norm / (g_norm + eps)
                else:
                    local_lr = torch.ones_like(w_norm)
                update = grad * local_lr
                state = self.state[p]
                if "momentum_buffer" not in state:
                    buf = state["momentum_buffer"] = torch.clone(update).detach()
                else:
                    buf = state["momentum_buffer"]
                    buf.mul_(momentum).add_(update)
                p.add_(buf, alpha=-lr)
        return loss


def build_optimizer(params, kind: str, lr: float, momentum: float = 0.9,
                    weight_decay: float = 0.0):
    """kind = 'lars' for the adaptive optimizer, 'sgd' for the fallback used
    in fast desk-scale tests."""
    if kind == "lars":
        return LARS(params, lr=lr, momentum=momentum, weight_decay=weight_decay)
    if kind == "sgd":
        return torch.optim.SGD(params, lr=lr, momentum=momentum,
                               weight_decay=weight_decay)
    raise ValueError(f"unknown optimizer kind {kind!r}")
