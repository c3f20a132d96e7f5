"""Desk-scale pendulum swing-up with a reward-variance knob.

The dynamics are deterministic; the knob nu adds zero-mean Gaussian noise to
the reward channel only, so the variance of the reinforcement signal is
directly controllable. Episodes end by time limit only (no absorbing states).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

GRAVITY = 10.0
MASS = 1.0
LENGTH = 1.0
DT = 0.05
MAX_SPEED = 8.0
MAX_TORQUE = 2.0


@dataclass(frozen=True)
class EnvSpec:
    obs_dim: int = 3
    act_dim: int = 1
    action_low: float = -MAX_TORQUE
    action_high: float = MAX_TORQUE
    max_episode_steps: int = 200
    nu: float = 0.0
    gamma: float = 0.99

    def __post_init__(self):
        if self.action_low >= self.action_high:
            raise ValueError("action_low must be below action_high")
        if not 0.0 <= self.gamma < 1.0:
            raise ValueError("gamma must lie in [0, 1)")
        if self.nu < 0:
            raise ValueError("nu must be nonnegative")


def angle_wrap(x):
    """Wrap angles to (-pi, pi]."""
    return np.pi - np.remainder(np.pi - x, 2.0 * np.pi)


def pendulum_dynamics(theta, theta_dot, torque):
    """One semi-implicit Euler step; works elementwise on arrays."""
    acc = 3.0 * GRAVITY / (2.0 * LENGTH) * np.sin(theta) + 3.0 / (
        MASS * LENGTH**2
    ) * torque
    new_dot = np.clip(theta_dot + acc * DT, -MAX_SPEED, MAX_SPEED)
    new_theta = angle_wrap(theta + new_dot * DT)
    return new_theta, new_dot


def base_reward(theta, theta_dot, torque):
    """Negated quadratic cost of angle, speed and control effort."""
    return -(angle_wrap(theta) ** 2 + 0.1 * theta_dot**2 + 0.001 * torque**2)


def observation(theta, theta_dot):
    return np.stack(
        [np.cos(theta), np.sin(theta), np.asarray(theta_dot, dtype=float)], axis=-1
    )


def state_from_observation(obs):
    """Recover (theta, theta_dot) from (cos, sin, theta_dot) observations."""
    obs = np.asarray(obs)
    return np.arctan2(obs[..., 1], obs[..., 0]), obs[..., 2]


class NoisyPendulum:
    """Single pendulum instance with its own RNG for resets and reward noise."""

    def __init__(self, spec: EnvSpec, rng: np.random.Generator | None = None):
        self.spec = spec
        self.rng = rng if rng is not None else np.random.default_rng()
        self.theta = 0.0
        self.theta_dot = 0.0
        self.steps = 0

    def reset(self, seed: int | None = None) -> np.ndarray:
        if seed is not None:
            self.rng = np.random.default_rng(seed)
        # uniform over (-pi, pi]; the open/closed boundary is measure zero
        self.theta = self.rng.uniform(-np.pi, np.pi)
        self.theta_dot = self.rng.uniform(-1.0, 1.0)
        self.steps = 0
        return self._obs()

    def set_state(self, theta: float, theta_dot: float) -> None:
        """State injection, used by the true-Q rollout harness."""
        self.theta = float(angle_wrap(theta))
        self.theta_dot = float(np.clip(theta_dot, -MAX_SPEED, MAX_SPEED))
        self.steps = 0

    def step(self, action) -> tuple[np.ndarray, float, bool]:
        a = np.asarray(action, dtype=float).reshape(-1)[0]
        if not np.isfinite(a):
            raise ValueError("nonfinite action")
        a = float(np.clip(a, self.spec.action_low, self.spec.action_high))
        reward = float(base_reward(self.theta, self.theta_dot, a))
        if self.spec.nu > 0:
            reward += self.spec.nu * self.rng.standard_normal()
        self.theta, self.theta_dot = (
            float(x) for x in pendulum_dynamics(self.theta, self.theta_dot, a)
        )
        self.steps += 1
        terminal = self.steps >= self.spec.max_episode_steps
        return self._obs(), reward, terminal

    def _obs(self) -> np.ndarray:
        return observation(self.theta, self.theta_dot)


def make_env(name: str, spec: EnvSpec, rng=None) -> NoisyPendulum:
    if name != "pendulum":
        raise ValueError(f"unknown environment {name!r}")
    return NoisyPendulum(spec, rng)
