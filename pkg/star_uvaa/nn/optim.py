"""Adam optimizer and target-network soft updates."""

import numpy as np

from .layers import Module
from .tensor import ParamTensor


class Adam:
    def __init__(
        self,
        params: list[ParamTensor],
        lr: float = 7e-4,
        betas: tuple[float, float] = (0.9, 0.999),
        eps: float = 1e-8,
    ):
        self.params = list(params)
        self.lr = lr
        self.beta1, self.beta2 = betas
        self.eps = eps
        self.t = 0
        self.m = [np.zeros_like(p.data) for p in self.params]
        self.v = [np.zeros_like(p.data) for p in self.params]

    def zero_grad(self) -> None:
        for p in self.params:
            p.zero_grad()

    def step(self) -> None:
        self.t += 1
        correction1 = 1.0 - self.beta1**self.t
        correction2 = 1.0 - self.beta2**self.t
        for i, p in enumerate(self.params):
            g = p.grad
            self.m[i] = self.beta1 * self.m[i] + (1.0 - self.beta1) * g
            self.v[i] = self.beta2 * self.v[i] + (1.0 - self.beta2) * g * g
            m_hat = self.m[i] / correction1
            v_hat = self.v[i] / correction2
            p.data = p.data - self.lr * m_hat / (np.sqrt(v_hat) + self.eps)

    def state(self) -> dict:
        return {
            "t": self.t,
            "m": [m.copy() for m in self.m],
            "v": [v.copy() for v in self.v],
        }


def soft_update(online: Module, target: Module, tau: float) -> None:
    """target ← τ·online + (1 − τ)·target, parameter by parameter."""
    if not 0.0 <= tau <= 1.0:
        raise ValueError("tau must lie in [0, 1]")
    online_params = dict(online.named_parameters())
    target_params = dict(target.named_parameters())
    if online_params.keys() != target_params.keys():
        raise ValueError("online and target networks have different parameters")
    for name, p in online_params.items():
        t = target_params[name]
        if t.data.shape != p.data.shape:
            raise ValueError(f"{name}: shape {p.data.shape} vs target {t.data.shape}")
        t.data = tau * p.data + (1.0 - tau) * t.data
