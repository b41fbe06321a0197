"""Minimal numpy differentiable-computation layer used by the learners."""

from .layers import Linear, Mlp, Module, check_finite
from .optim import Adam, soft_update
from .tensor import (
    ParamTensor,
    Tensor,
    as_tensor,
    clip,
    concat,
    exp,
    log,
    relu,
    softmax,
    softplus,
    tanh,
    tsum,
)

__all__ = [
    "Tensor",
    "ParamTensor",
    "as_tensor",
    "clip",
    "concat",
    "exp",
    "log",
    "relu",
    "softmax",
    "softplus",
    "tanh",
    "tsum",
    "Module",
    "Linear",
    "Mlp",
    "check_finite",
    "Adam",
    "soft_update",
]
