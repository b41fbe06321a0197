"""Central finite-difference oracle for the autodiff layer."""

from typing import Callable, Iterable

import numpy as np

from .tensor import ParamTensor, Tensor


def numerical_gradient(
    loss_fn: Callable[[], Tensor], param: ParamTensor, eps: float = 1e-6
) -> np.ndarray:
    """Central differences of ``loss_fn()`` with respect to every entry of ``param``."""
    grad = np.zeros_like(param.data)
    flat = param.data.reshape(-1)
    for i in range(flat.size):
        original = flat[i]
        flat[i] = original + eps
        plus = float(loss_fn().data)
        flat[i] = original - eps
        minus = float(loss_fn().data)
        flat[i] = original
        grad.reshape(-1)[i] = (plus - minus) / (2.0 * eps)
    return grad


def max_relative_error(analytic: np.ndarray, numeric: np.ndarray, atol: float = 1e-6) -> float:
    """Largest |a - n| / max(|a|, |n|) over entries whose difference exceeds ``atol``."""
    diff = np.abs(analytic - numeric)
    scale = np.maximum(np.abs(analytic), np.abs(numeric))
    relevant = diff > atol
    if not np.any(relevant):
        return 0.0
    return float(np.max(diff[relevant] / scale[relevant]))


def check_gradients(
    loss_fn: Callable[[], Tensor],
    params: Iterable[ParamTensor],
    eps: float = 1e-6,
    atol: float = 1e-6,
) -> float:
    """Backpropagate once and compare against finite differences; returns the worst error."""
    params = list(params)
    for p in params:
        p.zero_grad()
    loss_fn().backward()
    analytic = [p.grad.copy() for p in params]
    worst = 0.0
    for p, grad in zip(params, analytic):
        worst = max(worst, max_relative_error(grad, numerical_gradient(loss_fn, p, eps), atol))
    return worst
