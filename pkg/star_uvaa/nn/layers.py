"""Parameter containers and feed-forward layers."""

import math
from typing import Iterator, Optional

import numpy as np

from ..errors import NumericalError
from .tensor import ParamTensor, Tensor, as_tensor, relu


class Module:
    """Base class collecting ParamTensors from attributes, sub-modules and module lists."""

    name: str = ""

    def named_parameters(self, prefix: str = "") -> Iterator[tuple[str, ParamTensor]]:
        for attr, value in vars(self).items():
            key = f"{prefix}{attr}"
            if isinstance(value, ParamTensor):
                yield key, value
            elif isinstance(value, Module):
                yield from value.named_parameters(f"{key}.")
            elif isinstance(value, (list, tuple)):
                for i, item in enumerate(value):
                    if isinstance(item, Module):
                        yield from item.named_parameters(f"{key}.{i}.")

    def parameters(self) -> list[ParamTensor]:
        return [p for _, p in self.named_parameters()]

    def zero_grad(self) -> None:
        for p in self.parameters():
            p.zero_grad()

    def state_dict(self) -> dict[str, np.ndarray]:
        return {name: p.data.copy() for name, p in self.named_parameters()}

    def load_state_dict(self, state: dict[str, np.ndarray]) -> None:
        own = dict(self.named_parameters())
        missing = set(own) - set(state)
        unexpected = set(state) - set(own)
        if missing or unexpected:
            raise KeyError(
                f"state mismatch: missing {sorted(missing)}, unexpected {sorted(unexpected)}"
            )
        for name, p in own.items():
            value = np.asarray(state[name], dtype=np.float64)
            if value.shape != p.data.shape:
                raise ValueError(f"{name}: expected shape {p.data.shape}, got {value.shape}")
            p.data = value.copy()

    def copy_from(self, other: "Module") -> None:
        self.load_state_dict(other.state_dict())


class Linear(Module):
    """y = x W + b with uniform(±1/sqrt(fan_in)) initialization."""

    def __init__(self, in_features: int, out_features: int, rng: np.random.Generator, name: str = ""):
        self.name = name
        bound = 1.0 / math.sqrt(in_features)
        self.weight = ParamTensor(
            rng.uniform(-bound, bound, size=(in_features, out_features)), name=f"{name}.weight"
        )
        self.bias = ParamTensor(
            rng.uniform(-bound, bound, size=(1, out_features)), name=f"{name}.bias"
        )

    def __call__(self, x: Tensor) -> Tensor:
        return as_tensor(x) @ self.weight + self.bias


class Mlp(Module):
    """Stack of Linear layers with ReLU between them and a linear output."""

    def __init__(self, sizes: list[int], rng: np.random.Generator, name: str = "mlp"):
        if len(sizes) < 2:
            raise ValueError("an MLP needs at least input and output sizes")
        self.name = name
        self.layers = [
            Linear(sizes[i], sizes[i + 1], rng, name=f"{name}.layers.{i}")
            for i in range(len(sizes) - 1)
        ]

    def __call__(self, x: Tensor, activate_output: bool = False) -> Tensor:
        h = as_tensor(x)
        last = len(self.layers) - 1
        for i, layer in enumerate(self.layers):
            h = layer(h)
            if i < last or activate_output:
                h = relu(h)
            check_finite(h, layer.name)
        return h


def check_finite(tensor: Tensor, layer: Optional[str] = None) -> Tensor:
    if not np.all(np.isfinite(tensor.data)):
        raise NumericalError("non-finite network output", layer=layer)
    return tensor
