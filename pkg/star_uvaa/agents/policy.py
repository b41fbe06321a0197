"""Tanh-squashed Gaussian policy of one UAV."""

import math

import numpy as np

from ..data_model import UavAction
from ..env import ActionSpace
from ..errors import NumericalError
from ..nn import Mlp, Module, Tensor, as_tensor, clip, exp, softplus, tanh, tsum

LOG_STD_MIN = -20.0
LOG_STD_MAX = 2.0
LOG_TWO = math.log(2.0)
HALF_LOG_TWO_PI = 0.5 * math.log(2.0 * math.pi)


def squash_log_jacobian(pre_squash: Tensor) -> Tensor:
    """log(1 - tanh(u)²), written to stay finite for large |u|."""
    return 2.0 * (LOG_TWO - pre_squash - softplus(-2.0 * pre_squash))


class GaussianPolicy(Module):
    """Observation -> (mean, log std) per action dimension, sampled and squashed to [-1, 1].

    Physical actions are an affine image of the squashed sample, so the density
    over physical actions differs only by the constant ``action_space.log_scale()``.
    """

    def __init__(
        self,
        obs_dim: int,
        action_space: ActionSpace,
        hidden: list[int],
        rng: np.random.Generator,
        name: str = "policy",
    ):
        self.name = name
        self.action_space = action_space
        self.action_dim = action_space.dim
        self.body = Mlp([obs_dim, *hidden, 2 * self.action_dim], rng, name=f"{name}.body")

    def distribution(self, obs: Tensor) -> tuple[Tensor, Tensor]:
        out = self.body(as_tensor(obs))
        mean = out[:, : self.action_dim]
        log_std = clip(out[:, self.action_dim :], LOG_STD_MIN, LOG_STD_MAX)
        return mean, log_std

    def log_prob_terms(
        self, noise: np.ndarray, log_std: Tensor, pre_squash: Tensor
    ) -> Tensor:
        """Per-dimension log density of the squashed sample."""
        gaussian = -0.5 * noise**2 - log_std - HALF_LOG_TWO_PI
        return gaussian - squash_log_jacobian(pre_squash)

    def sample(self, obs: Tensor, noise: np.ndarray) -> tuple[Tensor, Tensor]:
        """
        Reparameterized sample.

        Args:
            obs: (batch, obs_dim) normalized observations
            noise: (batch, action_dim) standard normal draws

        Returns:
            Squashed actions in (-1, 1) of shape (batch, action_dim) and their
            log densities of shape (batch, 1)
        """
        mean, log_std = self.distribution(obs)
        pre_squash = mean + exp(log_std) * noise
        action = tanh(pre_squash)
        log_prob = tsum(self.log_prob_terms(noise, log_std, pre_squash), axis=1, keepdims=True)
        if not np.all(np.isfinite(log_prob.data)):
            raise NumericalError("non-finite policy log-probability", layer=self.body.name)
        return action, log_prob

    def deterministic(self, obs: Tensor) -> Tensor:
        mean, _ = self.distribution(obs)
        return tanh(mean)


def policy_sample(
    obs: np.ndarray,
    policy: GaussianPolicy,
    generator: np.random.Generator,
    deterministic: bool = False,
) -> tuple[UavAction, float, np.ndarray]:
    """
    Draw one physical action for one observation.

    Returns:
        The physical action, its log density (physical units, including the
        squashing and scaling Jacobians) and the normalized action in [-1, 1]
    """
    obs = np.asarray(obs, dtype=float).reshape(1, -1)
    if deterministic:
        normalized = policy.deterministic(Tensor(obs)).data[0]
        log_prob = float("nan")
    else:
        noise = generator.standard_normal((1, policy.action_dim))
        action, log_prob_t = policy.sample(Tensor(obs), noise)
        normalized = action.data[0]
        log_prob = float(log_prob_t.data[0, 0]) - policy.action_space.log_scale()
    physical = policy.action_space.to_physical(normalized)
    return UavAction.from_array(physical), log_prob, normalized
