"""Delayed actor-critic training with interchangeable critic-target rules.

Implements the single-critic rule (ddpg), clipped double (td3), the fixed
weighted combinations (wd3, tadd), the triplet min-max rule (tcd3) and the
stochastic weighted twin update (swt) whose mixing weight is sampled from a
linearly widening interval.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import numpy as np

from . import nets
from .envs import EnvSpec, NoisyPendulum
from .nets import AdamState, NetworkParams
from .replay import ReplayBuffer, Transition

RULES = ("ddpg", "clipped_double", "wd3", "tadd", "tcd3", "swt")
THREE_CRITIC_RULES = ("tadd", "tcd3")


@dataclass
class BetaScheduleState:
    """Sampling interval [lower, beta0] with a linearly decaying lower bound."""

    T: int
    beta0: float = 0.5
    alpha: float = 0.05
    lower: float = field(default=None)  # type: ignore[assignment]
    t: int = 0

    def __post_init__(self):
        if self.lower is None:
            self.lower = self.beta0
        if not self.alpha <= self.lower <= self.beta0:
            raise ValueError("need alpha <= lower <= beta0")
        if self.T < 1:
            raise ValueError("T must be positive")


def swt_draw_beta(schedule: BetaScheduleState, rng: np.random.Generator) -> float:
    """Uniform draw on [lower, beta0]; does not advance the schedule."""
    if schedule.lower == schedule.beta0:
        rng.uniform(schedule.lower, schedule.beta0)  # keep stream alignment
        return schedule.beta0
    return float(rng.uniform(schedule.lower, schedule.beta0))


def swt_advance(schedule: BetaScheduleState) -> None:
    """Advance the linear decay by one step: lower = b0 - (b0 - a) * t / T."""
    if schedule.t >= schedule.T:
        raise ValueError("schedule advanced past its horizon")
    schedule.t += 1
    if schedule.t == schedule.T:
        schedule.lower = schedule.alpha  # exact endpoint, no round-off
        return
    lower = schedule.beta0 - (schedule.beta0 - schedule.alpha) * schedule.t / schedule.T
    schedule.lower = max(lower, schedule.alpha)


@dataclass
class TargetRule:
    """Tagged choice of critic-target formula."""

    kind: str
    beta: float = 0.5
    snapshots: int = 3  # ring length for the snapshot-averaged third critic
    schedule: BetaScheduleState | None = None

    def __post_init__(self):
        if self.kind not in RULES:
            raise ValueError(f"unknown rule {self.kind!r}")
        if not 0.0 <= self.beta <= 1.0:
            raise ValueError("beta must lie in [0, 1]")
        if self.snapshots < 1:
            raise ValueError("snapshot count must be at least 1")
        if self.kind == "swt" and self.schedule is None:
            raise ValueError("swt rule needs a schedule")

    @property
    def needs_third_critic(self) -> bool:
        return self.kind in THREE_CRITIC_RULES


@dataclass
class Hyperparams:
    gamma: float = 0.99
    tau: float = 0.005
    policy_delay: int = 2
    expl_noise: float = 0.1  # fraction of the action half-range
    target_noise: float = 0.2  # fraction of the action half-range
    noise_clip: float = 0.5  # fraction of the action half-range
    batch_size: int = 256
    lr: float = 3e-4
    warmup_steps: int = 1000
    hidden: tuple[int, int] = (256, 256)
    replay_capacity: int = 1_000_000


@dataclass
class RngStreams:
    """Named generators split from one root seed.

    Each consumer owns a stream, so adding one does not perturb the others.
    """

    init: np.random.Generator
    env: np.random.Generator
    explore: np.random.Generator
    target_noise: np.random.Generator
    replay: np.random.Generator
    beta: np.random.Generator
    eval: np.random.Generator
    bias: np.random.Generator

    @classmethod
    def from_seed(cls, seed: int) -> "RngStreams":
        children = np.random.SeedSequence(seed).spawn(8)
        return cls(*(np.random.default_rng(c) for c in children))


@dataclass
class LogRecord:
    step: int
    eval_return: float
    critic1_loss: float
    critic2_loss: float
    beta_lower: float
    beta_sampled_mean: float


def smoothed_target_action(
    target_actor: NetworkParams,
    next_states: np.ndarray,
    sigma_t: float,
    c: float,
    rng: np.random.Generator,
    action_low: float,
    action_high: float,
) -> np.ndarray:
    """Target action with clipped Gaussian smoothing noise, kept in the box."""
    if c < 0:
        raise ValueError("clip bound must be nonnegative")
    a = nets.forward(target_actor, next_states)
    noise = np.clip(sigma_t * rng.standard_normal(a.shape), -c, c)
    return np.clip(a + noise, action_low, action_high)


class Agent:
    """Actor plus two (or three) critics with paired target networks."""

    def __init__(
        self,
        env_spec: EnvSpec,
        rule: TargetRule,
        hp: Hyperparams,
        rngs: RngStreams,
    ):
        self.env_spec = env_spec
        self.rule = rule
        self.hp = hp
        self.rngs = rngs
        obs, act = env_spec.obs_dim, env_spec.act_dim
        h = list(hp.hidden)
        low = np.full(act, env_spec.action_low)
        high = np.full(act, env_spec.action_high)
        self.actor = nets.init_network([obs] + h + [act], rngs.init, low, high)
        self.q1 = nets.init_network([obs + act] + h + [1], rngs.init)
        self.q2 = nets.init_network([obs + act] + h + [1], rngs.init)
        self.actor_t = self.actor.copy()
        self.q1_t = self.q1.copy()
        self.q2_t = self.q2.copy()
        self.opt_actor = AdamState.for_network(self.actor, hp.lr)
        self.opt_q1 = AdamState.for_network(self.q1, hp.lr)
        self.opt_q2 = AdamState.for_network(self.q2, hp.lr)
        self.q3 = self.q3_t = self.opt_q3 = None
        self.snapshot_ring: deque[NetworkParams] | None = None
        if rule.needs_third_critic:
            self.q3 = nets.init_network([obs + act] + h + [1], rngs.init)
            self.q3_t = self.q3.copy()
            self.opt_q3 = AdamState.for_network(self.q3, hp.lr)
            if rule.kind == "tadd":
                self.snapshot_ring = deque(maxlen=rule.snapshots)
                self.snapshot_ring.append(self.q3_t.copy())
        self.replay = ReplayBuffer(hp.replay_capacity, obs, act)
        half = 0.5 * (env_spec.action_high - env_spec.action_low)
        self._expl_sigma = hp.expl_noise * half
        self._target_sigma = hp.target_noise * half
        self._noise_clip = hp.noise_clip * half
        self.last_beta = float("nan")

    # -- action selection ---------------------------------------------------

    def select_action(self, state, explore: bool, step: int = 0) -> np.ndarray:
        low, high = self.env_spec.action_low, self.env_spec.action_high
        if explore and step < self.hp.warmup_steps:
            return self.rngs.explore.uniform(low, high, size=self.env_spec.act_dim)
        a = nets.forward(self.actor, np.asarray(state, dtype=float))
        if explore and self._expl_sigma > 0:
            a = a + self._expl_sigma * self.rngs.explore.standard_normal(a.shape)
        return np.clip(a, low, high)

    # -- critic targets -----------------------------------------------------

    def smoothed_target_action(self, next_states: np.ndarray) -> np.ndarray:
        return smoothed_target_action(
            self.actor_t,
            next_states,
            self._target_sigma,
            self._noise_clip,
            self.rngs.target_noise,
            self.env_spec.action_low,
            self.env_spec.action_high,
        )

    def compute_target(
        self,
        rewards: np.ndarray,
        next_states: np.ndarray,
        terminal_mask: np.ndarray,
        smoothed_actions: np.ndarray,
    ) -> np.ndarray:
        """Target batch y = r + mask * gamma * V(s') with rule-specific V."""
        x = np.concatenate([next_states, smoothed_actions], axis=1)
        q1 = nets.forward(self.q1_t, x)[:, 0]
        kind = self.rule.kind
        if kind == "ddpg":
            v = q1
        else:
            q2 = nets.forward(self.q2_t, x)[:, 0]
            lo = np.minimum(q1, q2)
            if kind == "clipped_double":
                v = lo
            elif kind == "wd3":
                b = self.rule.beta
                v = b * lo + (1.0 - b) * 0.5 * (q1 + q2)
            elif kind == "tadd":
                b = self.rule.beta
                ring = self.snapshot_ring
                q3 = np.mean([nets.forward(p, x)[:, 0] for p in ring], axis=0)
                v = b * lo + (1.0 - b) * q3
            elif kind == "tcd3":
                q3 = nets.forward(self.q3_t, x)[:, 0]
                v = np.minimum(np.maximum(q1, q2), q3)
            elif kind == "swt":
                b = swt_draw_beta(self.rule.schedule, self.rngs.beta)
                self.last_beta = b
                v = b * lo + (1.0 - b) * q1
            else:  # pragma: no cover
                raise ValueError(kind)
        mask = 1.0 - np.asarray(terminal_mask, dtype=float)
        return rewards + mask * self.env_spec.gamma * v

    # -- updates ------------------------------------------------------------

    def critic_update(self, batch) -> tuple[float, float]:
        states, actions, rewards, next_states, terminals = batch
        smoothed = self.smoothed_target_action(next_states)
        y = self.compute_target(rewards, next_states, terminals, smoothed)
        x = np.concatenate([states, actions], axis=1)
        g1, loss1 = nets.grad_mse(self.q1, x, y)
        g2, loss2 = nets.grad_mse(self.q2, x, y)
        nets.adam_step(self.q1, g1, self.opt_q1)
        nets.adam_step(self.q2, g2, self.opt_q2)
        if self.q3 is not None:
            g3, _ = nets.grad_mse(self.q3, x, y)
            nets.adam_step(self.q3, g3, self.opt_q3)
        return loss1, loss2

    def actor_update_and_sync(self, batch, step: int) -> None:
        """Every policy_delay-th step: DPG ascent through Q1, then Polyak."""
        if step % self.hp.policy_delay != 0:
            return
        states = batch[0]
        grads, _ = nets.grad_dpg(self.actor, self.q1, states)
        nets.adam_step(self.actor, nets.negate_grads(grads), self.opt_actor)
        tau = self.hp.tau
        nets.soft_update(self.q1_t, self.q1, tau)
        nets.soft_update(self.q2_t, self.q2, tau)
        nets.soft_update(self.actor_t, self.actor, tau)
        if self.q3 is not None:
            nets.soft_update(self.q3_t, self.q3, tau)
            if self.snapshot_ring is not None:
                self.snapshot_ring.append(self.q3_t.copy())

    def training_networks(self) -> dict[str, NetworkParams]:
        out = {
            "actor": self.actor,
            "actor_t": self.actor_t,
            "q1": self.q1,
            "q2": self.q2,
            "q1_t": self.q1_t,
            "q2_t": self.q2_t,
        }
        if self.q3 is not None:
            out["q3"] = self.q3
            out["q3_t"] = self.q3_t
        return out


def evaluate_policy(
    agent: Agent, env: NoisyPendulum, episodes: int = 10
) -> float:
    """Average undiscounted return over noise-free policy episodes."""
    total = 0.0
    for _ in range(episodes):
        obs = env.reset()
        done = False
        while not done:
            a = agent.select_action(obs, explore=False)
            obs, r, done = env.step(a)
            total += r
    return total / episodes


def train(
    agent: Agent,
    env: NoisyPendulum,
    total_steps: int,
    eval_every: int,
    eval_env: NoisyPendulum | None = None,
    on_step=None,
) -> list[LogRecord]:
    """Interact-store-sample-update loop with periodic policy evaluation.

    on_step(step, agent) runs after each environment step; used by the bias
    harness. Returns one log record per evaluation point.
    """
    log: list[LogRecord] = []
    if total_steps == 0:
        return log
    if eval_env is None:
        eval_env = NoisyPendulum(agent.env_spec, agent.rngs.eval)
    obs = env.reset()
    beta_sum, beta_n = 0.0, 0
    for step in range(1, total_steps + 1):
        a = agent.select_action(obs, explore=True, step=step - 1)
        next_obs, r, done = env.step(a)
        # time-limit truncation: bookkeeping terminal, but still bootstrap
        agent.replay.push(Transition(obs, a, r, next_obs, False))
        obs = env.reset() if done else next_obs
        if step > agent.hp.warmup_steps:
            batch = agent.replay.sample(agent.hp.batch_size, agent.rngs.replay)
            loss1, loss2 = agent.critic_update(batch)
            agent.actor_update_and_sync(batch, step)
            if agent.rule.kind == "swt":
                beta_sum += agent.last_beta
                beta_n += 1
        else:
            loss1 = loss2 = float("nan")
        if agent.rule.kind == "swt" and agent.rule.schedule.t < agent.rule.schedule.T:
            swt_advance(agent.rule.schedule)
        if on_step is not None:
            on_step(step, agent)
        if step % eval_every == 0:
            ret = evaluate_policy(agent, eval_env)
            if agent.rule.kind == "swt":
                lower = agent.rule.schedule.lower
                beta_mean = beta_sum / beta_n if beta_n else float("nan")
            else:
                lower = beta_mean = float("nan")
            log.append(LogRecord(step, ret, loss1, loss2, lower, beta_mean))
            beta_sum, beta_n = 0.0, 0
    return log


def make_rule(
    kind: str,
    beta: float = 0.5,
    snapshots: int = 3,
    total_steps: int | None = None,
    beta0: float = 0.5,
    alpha: float = 0.05,
) -> TargetRule:
    schedule = None
    if kind == "swt":
        if total_steps is None:
            raise ValueError("swt rule needs total_steps for its schedule")
        schedule = BetaScheduleState(T=max(total_steps, 1), beta0=beta0, alpha=alpha)
    return TargetRule(kind=kind, beta=beta, snapshots=snapshots, schedule=schedule)
