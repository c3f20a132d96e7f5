"""True-versus-estimated Q-value measurement along training.

Ground truth is a Monte Carlo discounted-return rollout: from each sampled
(state, action) pair, apply the given action once, then follow the current
deterministic policy for a fixed horizon. The pendulum dynamics are rolled
out vectorized over all start pairs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import envs, nets
from .agents import Agent, LogRecord, train
from .envs import EnvSpec, NoisyPendulum


@dataclass(frozen=True)
class BiasRecord:
    step: int
    estimated_q_mean: float
    true_q_mean: float
    bias: float
    n_samples: int

    def __post_init__(self):
        if self.bias != self.estimated_q_mean - self.true_q_mean:
            raise ValueError("bias must equal estimated - true exactly")


def estimate_true_q(
    actor: nets.NetworkParams,
    env_spec: EnvSpec,
    states: np.ndarray,
    actions: np.ndarray,
    gamma: float,
    horizon: int,
    rng: np.random.Generator,
) -> float:
    """Mean discounted return over the start pairs, truncated at horizon.

    The first action is the given one; afterwards the deterministic policy
    acts. Reward noise (nu > 0) is drawn fresh per step and pair.
    """
    theta, theta_dot = envs.state_from_observation(states)
    theta = theta.copy()
    theta_dot = theta_dot.copy()
    torque = np.clip(
        np.asarray(actions)[:, 0], env_spec.action_low, env_spec.action_high
    )
    n = theta.shape[0]
    returns = np.zeros(n)
    discount = 1.0
    for i in range(horizon):
        r = envs.base_reward(theta, theta_dot, torque)
        if env_spec.nu > 0:
            r = r + env_spec.nu * rng.standard_normal(n)
        returns += discount * r
        discount *= gamma
        theta, theta_dot = envs.pendulum_dynamics(theta, theta_dot, torque)
        if i + 1 < horizon:
            obs = envs.observation(theta, theta_dot)
            a = nets.forward(actor, obs)
            torque = np.clip(a[:, 0], env_spec.action_low, env_spec.action_high)
    return float(np.mean(returns))


def probe_bias(
    agent: Agent, step: int, n: int, horizon: int, rng: np.random.Generator
) -> BiasRecord:
    """One bias record: mean Q1 estimate minus MC true Q on replay pairs."""
    states, actions = agent.replay.recent_pairs(n, rng)
    x = np.concatenate([states, actions], axis=1)
    estimated = float(np.mean(nets.forward(agent.q1, x)))
    true_q = estimate_true_q(
        agent.actor,
        agent.env_spec,
        states,
        actions,
        agent.env_spec.gamma,
        horizon,
        rng,
    )
    return BiasRecord(step, estimated, true_q, estimated - true_q, n)


def measure_bias(
    agent: Agent,
    env: NoisyPendulum,
    total_steps: int,
    n: int,
    cadence: int,
    horizon: int = 1000,
    eval_every: int | None = None,
    eval_env: NoisyPendulum | None = None,
) -> tuple[list[BiasRecord], list[LogRecord]]:
    """Train with bias measurement interleaved every `cadence` steps."""
    if n < 1:
        raise ValueError("n must be at least 1")
    records: list[BiasRecord] = []

    def on_step(step: int, ag: Agent) -> None:
        if step % cadence == 0:
            records.append(probe_bias(ag, step, n, horizon, ag.rngs.bias))

    if eval_every is None:
        eval_every = total_steps  # log once at the end
    log = train(agent, env, total_steps, eval_every, eval_env, on_step=on_step)
    return records, log
