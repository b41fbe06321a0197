"""Soft Q-functions: attention-augmented centralized critic and plain MLP critics."""

import math
from typing import Literal, Sequence

import numpy as np

from ..nn import Linear, Mlp, Module, ParamTensor, Tensor, as_tensor, concat, relu, softmax, tsum


class AttentionCritic(Module):
    """
    Q_m(s, a) = f_m(e_m, x_m) with e_m = g_m(s, a_m) and x_m an attention-weighted
    sum over the other agents' value projections.

    Keys and values are projected from the raw actions of the other agents;
    the query comes from the embedding. With a single agent the attention
    output is a zero vector.
    """

    def __init__(
        self,
        agent: int,
        n_agents: int,
        obs_dim: int,
        action_dim: int,
        embed_dim: int,
        hidden: list[int],
        key_dim: int,
        rng: np.random.Generator,
        name: str = "critic",
    ):
        self.name = name
        self.agent = agent
        self.n_agents = n_agents
        self.key_dim = key_dim
        self.embed = Linear(obs_dim + action_dim, embed_dim, rng, name=f"{name}.embed")
        scale = 1.0 / math.sqrt(embed_dim)
        self.w_query = ParamTensor(rng.uniform(-scale, scale, (embed_dim, key_dim)), f"{name}.w_query")
        scale = 1.0 / math.sqrt(action_dim)
        self.w_key = ParamTensor(rng.uniform(-scale, scale, (action_dim, key_dim)), f"{name}.w_key")
        self.w_value = ParamTensor(rng.uniform(-scale, scale, (action_dim, key_dim)), f"{name}.w_value")
        self.head = Mlp([embed_dim + key_dim, *hidden, 1], rng, name=f"{name}.head")

    def attention(self, embedding: Tensor, others: Sequence[Tensor]) -> Tensor:
        batch = embedding.shape[0]
        if not others:
            return Tensor(np.zeros((batch, self.key_dim)))
        query = embedding @ self.w_query
        scores = concat(
            [tsum(query * (a_n @ self.w_key), axis=1, keepdims=True) for a_n in others], axis=1
        ) / math.sqrt(self.key_dim)
        weights = softmax(scores, axis=1)
        mixed = None
        for i, a_n in enumerate(others):
            term = weights[:, i : i + 1] * (a_n @ self.w_value)
            mixed = term if mixed is None else mixed + term
        return mixed

    def __call__(self, obs: Tensor, actions: Sequence[Tensor]) -> Tensor:
        actions = [as_tensor(a) for a in actions]
        if len(actions) != self.n_agents:
            raise ValueError(f"expected {self.n_agents} action blocks, got {len(actions)}")
        embedding = relu(self.embed(concat([as_tensor(obs), actions[self.agent]], axis=1)))
        others = [a for n, a in enumerate(actions) if n != self.agent]
        return self.head(concat([embedding, self.attention(embedding, others)], axis=1))


class MlpCritic(Module):
    """Q over (s, all actions) when ``scope='joint'`` or (s, own action) when ``scope='own'``."""

    def __init__(
        self,
        agent: int,
        n_agents: int,
        obs_dim: int,
        action_dim: int,
        hidden: list[int],
        rng: np.random.Generator,
        scope: Literal["joint", "own"] = "joint",
        name: str = "critic",
    ):
        self.name = name
        self.agent = agent
        self.n_agents = n_agents
        self.scope = scope
        width = action_dim * (n_agents if scope == "joint" else 1)
        self.net = Mlp([obs_dim + width, *hidden, 1], rng, name=f"{name}.net")

    def __call__(self, obs: Tensor, actions: Sequence[Tensor]) -> Tensor:
        actions = [as_tensor(a) for a in actions]
        if len(actions) != self.n_agents:
            raise ValueError(f"expected {self.n_agents} action blocks, got {len(actions)}")
        blocks = actions if self.scope == "joint" else [actions[self.agent]]
        return self.net(concat([as_tensor(obs), *blocks], axis=1))


def attention_q(
    critic: AttentionCritic, obs: np.ndarray, joint_actions: np.ndarray
) -> float:
    """Scalar Q for a single state and an (n_agents, action_dim) joint action."""
    obs = np.asarray(obs, dtype=float).reshape(1, -1)
    joint_actions = np.asarray(joint_actions, dtype=float)
    blocks = [Tensor(joint_actions[n].reshape(1, -1)) for n in range(joint_actions.shape[0])]
    return float(critic(Tensor(obs), blocks).data[0, 0])
