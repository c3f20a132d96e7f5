"""Fixed-capacity uniform-sampling experience replay."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Transition:
    state: np.ndarray
    action: np.ndarray
    reward: float
    next_state: np.ndarray
    terminal: bool


class ReplayBuffer:
    """Ring buffer of transitions, sampled uniformly with replacement."""

    def __init__(self, capacity: int, obs_dim: int, act_dim: int):
        if capacity < 1:
            raise ValueError("capacity must be positive")
        self.capacity = capacity
        self.states = np.zeros((capacity, obs_dim))
        self.actions = np.zeros((capacity, act_dim))
        self.rewards = np.zeros(capacity)
        self.next_states = np.zeros((capacity, obs_dim))
        self.terminals = np.zeros(capacity, dtype=bool)
        self.size = 0
        self.cursor = 0

    def __len__(self) -> int:
        return self.size

    def push(self, t: Transition) -> None:
        state = np.asarray(t.state, dtype=float)
        next_state = np.asarray(t.next_state, dtype=float)
        action = np.asarray(t.action, dtype=float)
        if state.shape != (self.states.shape[1],) or next_state.shape != state.shape:
            raise ValueError("state width does not match the buffer")
        if action.shape != (self.actions.shape[1],):
            raise ValueError("action width does not match the buffer")
        i = self.cursor
        self.states[i] = state
        self.actions[i] = action
        self.rewards[i] = t.reward
        self.next_states[i] = next_state
        self.terminals[i] = t.terminal
        self.cursor = (i + 1) % self.capacity
        self.size = min(self.size + 1, self.capacity)

    def sample(self, k: int, rng: np.random.Generator):
        """k uniform draws with replacement over current contents."""
        if self.size == 0:
            raise ValueError("cannot sample from an empty buffer")
        idx = rng.integers(0, self.size, size=k)
        return (
            self.states[idx],
            self.actions[idx],
            self.rewards[idx],
            self.next_states[idx],
            self.terminals[idx],
        )

    def recent_pairs(self, k: int, rng: np.random.Generator):
        """k uniformly drawn (state, action) pairs for bias measurement."""
        if self.size == 0:
            raise ValueError("cannot sample from an empty buffer")
        idx = rng.integers(0, self.size, size=k)
        return self.states[idx], self.actions[idx]
