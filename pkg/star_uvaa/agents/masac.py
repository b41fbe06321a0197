"""Soft actor-critic agents for the UAVs and their update rules."""

from typing import Literal, Optional

import numpy as np
from loguru import logger

from ..data_model import TrainConfig
from ..env import ActionSpace
from ..errors import NumericalError
from ..nn import Adam, Module, Tensor, relu, soft_update
from ..replay import Batch
from .critic import AttentionCritic, MlpCritic
from .policy import GaussianPolicy
from .velocity import SpeedGuidance

CriticKind = Literal["attention", "joint", "own"]


def _min_q(values: list[Tensor]) -> Tensor:
    # min(a, b) = a - relu(a - b)
    result = values[0]
    for other in values[1:]:
        result = result - relu(result - other)
    return result


def _check_loss(loss: Tensor, what: str) -> float:
    value = float(loss.data)
    if not np.isfinite(value):
        raise NumericalError(f"non-finite {what}")
    return value


class UavAgent:
    """Actor, critic(s) and their target copies for one UAV."""

    def __init__(
        self,
        index: int,
        n_agents: int,
        obs_dim: int,
        action_space: ActionSpace,
        train: TrainConfig,
        critic_kind: CriticKind,
        generator: np.random.Generator,
    ):
        self.index = index
        self.n_agents = n_agents
        self.critic_kind = critic_kind
        self.action_dim = action_space.dim
        name = f"agent{index}"

        self.policy = GaussianPolicy(
            obs_dim, action_space, train.policy_hidden, generator, name=f"{name}.policy"
        )
        self.target_policy = GaussianPolicy(
            obs_dim, action_space, train.policy_hidden, generator, name=f"{name}.target_policy"
        )
        self.target_policy.copy_from(self.policy)

        n_critics = 2 if train.twin_critic else 1
        self.critics = [
            self._build_critic(obs_dim, train, generator, f"{name}.critic{i}")
            for i in range(n_critics)
        ]
        self.target_critics = [
            self._build_critic(obs_dim, train, generator, f"{name}.target_critic{i}")
            for i in range(n_critics)
        ]
        for target, online in zip(self.target_critics, self.critics):
            target.copy_from(online)

        self.policy_optimizer = Adam(self.policy.parameters(), lr=train.learning_rate)
        self.critic_optimizers = [
            Adam(c.parameters(), lr=train.learning_rate) for c in self.critics
        ]

    def _build_critic(
        self, obs_dim: int, train: TrainConfig, generator: np.random.Generator, name: str
    ) -> Module:
        if self.critic_kind == "attention":
            return AttentionCritic(
                self.index, self.n_agents, obs_dim, self.action_dim,
                train.critic_embed, train.critic_hidden, train.key_dim, generator, name=name,
            )
        return MlpCritic(
            self.index, self.n_agents, obs_dim, self.action_dim,
            train.critic_hidden, generator, scope=self.critic_kind, name=name,
        )

    def q(self, obs: Tensor, actions: list) -> Tensor:
        return _min_q([critic(obs, actions) for critic in self.critics])

    def target_q(self, obs: Tensor, actions: list) -> np.ndarray:
        return _min_q([critic(obs, actions) for critic in self.target_critics]).data

    def act(
        self, obs: np.ndarray, generator: np.random.Generator, deterministic: bool = False
    ) -> np.ndarray:
        """Normalized action in [-1, 1] for one normalized observation."""
        batch = Tensor(np.asarray(obs, dtype=float).reshape(1, -1))
        if deterministic:
            return self.policy.deterministic(batch).data[0]
        noise = generator.standard_normal((1, self.action_dim))
        action, _ = self.policy.sample(batch, noise)
        return action.data[0]

    def modules(self) -> dict[str, Module]:
        named = {"policy": self.policy, "target_policy": self.target_policy}
        for i, (c, t) in enumerate(zip(self.critics, self.target_critics)):
            named[f"critic{i}"] = c
            named[f"target_critic{i}"] = t
        return named


def td_target(
    agent: UavAgent,
    batch: Batch,
    agents: list[UavAgent],
    gamma: float,
    alpha: float,
    generator: np.random.Generator,
    guidance: Optional[SpeedGuidance] = None,
    reward_scale: float = 1.0,
) -> np.ndarray:
    """
    Soft Bellman target y = c·r_m + γ (Q̄_m(s', ā') - α log π̄_m(ā'_m | s')).

    One sample ā' is drawn from every agent's target policy; the target carries
    no gradient. With ``guidance`` the sampled speeds go through the episode's
    velocity transition, as they would in flight.
    """
    next_obs = Tensor(batch.next_observations)
    next_actions = []
    next_log_prob = None
    for other in agents:
        noise = generator.standard_normal((batch.size, other.action_dim))
        action, log_prob = other.target_policy.sample(next_obs, noise)
        if guidance is not None:
            action = guidance(action, generator)
        next_actions.append(Tensor(action.data))
        if other is agent:
            next_log_prob = log_prob.data

    rewards = batch.rewards[:, agent.index : agent.index + 1]
    target_q = agent.target_q(next_obs, next_actions)
    return reward_scale * rewards + gamma * (target_q - alpha * next_log_prob)


def critic_loss(agent: UavAgent, critic: Module, batch: Batch, y: np.ndarray) -> Tensor:
    obs = Tensor(batch.observations)
    actions = [Tensor(batch.agent_actions(n)) for n in range(agent.n_agents)]
    return (0.5 * (critic(obs, actions) - y) ** 2).mean()


def critic_update(
    agent: UavAgent,
    batch: Batch,
    agents: list[UavAgent],
    gamma: float,
    alpha: float,
    generator: np.random.Generator,
    guidance: Optional[SpeedGuidance] = None,
    reward_scale: float = 1.0,
) -> float:
    """
    One TD step on the agent's critic(s) towards ``td_target``.

    Returns:
        Mean squared TD loss (averaged over twin critics)
    """
    y = td_target(agent, batch, agents, gamma, alpha, generator, guidance, reward_scale)
    losses = []
    for critic, optimizer in zip(agent.critics, agent.critic_optimizers):
        optimizer.zero_grad()
        loss = critic_loss(agent, critic, batch, y)
        losses.append(_check_loss(loss, "critic loss"))
        loss.backward()
        optimizer.step()
    return float(np.mean(losses))


def actor_loss(
    agent: UavAgent,
    batch: Batch,
    alpha: float,
    noise: np.ndarray,
    generator: np.random.Generator,
    guidance: Optional[SpeedGuidance] = None,
) -> Tensor:
    """
    E[α log π_m(a_m|s) - Q_m(s, â)], where â is the buffered joint action with
    agent m's block replaced by the reparameterized sample for ``noise``.

    With ``guidance`` the fresh sample reaches the critic after the velocity
    transition, so the speed gradient is scaled by ζ and never taken at speeds
    the swarm did not fly.
    """
    obs = Tensor(batch.observations)
    own_action, log_prob = agent.policy.sample(obs, noise)
    if guidance is not None:
        own_action = guidance(own_action, generator)
    actions = [
        own_action if n == agent.index else Tensor(batch.agent_actions(n))
        for n in range(agent.n_agents)
    ]
    return (alpha * log_prob - agent.q(obs, actions)).mean()


def actor_update(
    agent: UavAgent,
    batch: Batch,
    alpha: float,
    generator: np.random.Generator,
    guidance: Optional[SpeedGuidance] = None,
) -> float:
    """One policy step on ``actor_loss``; the critics are left untouched."""
    agent.policy_optimizer.zero_grad()
    noise = generator.standard_normal((batch.size, agent.action_dim))
    loss = actor_loss(agent, batch, alpha, noise, generator, guidance)
    value = _check_loss(loss, "actor loss")
    loss.backward()
    agent.policy_optimizer.step()
    for critic in agent.critics:
        critic.zero_grad()
    return value


def update_targets(agent: UavAgent, tau: float) -> None:
    soft_update(agent.policy, agent.target_policy, tau)
    for online, target in zip(agent.critics, agent.target_critics):
        soft_update(online, target, tau)


def update_round(
    agents: list[UavAgent],
    batch: Batch,
    train: TrainConfig,
    generator: np.random.Generator,
    guidance: Optional[SpeedGuidance] = None,
) -> tuple[list[float], list[float]]:
    """Critic, actor and target updates for every agent in turn."""
    critic_losses, actor_losses = [], []
    for agent in agents:
        critic_losses.append(
            critic_update(
                agent, batch, agents, train.gamma, train.alpha_entropy, generator,
                guidance=guidance, reward_scale=train.reward_scale,
            )
        )
        actor_losses.append(
            actor_update(agent, batch, train.alpha_entropy, generator, guidance=guidance)
        )
        update_targets(agent, train.tau)
    logger.trace(f"Update round: critic {critic_losses}, actor {actor_losses}")
    return critic_losses, actor_losses
