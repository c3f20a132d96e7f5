"""Experiment configuration: JSON files, validation, shipped presets."""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field
from pathlib import Path

from .agents import Hyperparams, RULES, make_rule
from .envs import EnvSpec


class ConfigError(ValueError):
    """Invalid or malformed experiment configuration."""


# Environment-specific fixed mixing weights from the upstream fine-tuning
# studies; shipped for reference, keyed by task name.
TABLE_BETA = {
    "wd3": {
        "Ant-v2": 0.75,
        "BipedalWalker-v3": 0.5,
        "HalfCheetah-v2": 0.45,
        "Hopper-v2": 0.50,
        "HumanoidStandup-v2": 0.30,
        "Humanoid-v2": 0.30,
        "InvertedDoublePendulum-v2": 0.75,
        "InvertedPendulum-v2": 0.75,
        "LunarLanderContinuous-v2": 0.45,
        "Reacher-v2": 0.15,
        "Swimmer-v2": 0.45,
        "Walker2d-v2": 0.45,
    },
    "tadd": {
        "Ant-v2": 0.95,
        "BipedalWalker-v3": 0.5,
        "HalfCheetah-v2": 0.95,
        "Hopper-v2": 0.95,
        "HumanoidStandup-v2": 0.30,
        "Humanoid-v2": 0.30,
        "InvertedDoublePendulum-v2": 0.95,
        "InvertedPendulum-v2": 0.95,
        "LunarLanderContinuous-v2": 0.45,
        "Reacher-v2": 0.95,
        "Swimmer-v2": 0.20,
        "Walker2d-v2": 0.95,
    },
}


@dataclass
class ExperimentConfig:
    rule: str = "swt"
    beta: float = 0.5
    snapshots: int = 3
    beta0: float = 0.5
    alpha: float = 0.05

    env: str = "pendulum"
    nu: float = 0.0
    max_episode_steps: int = 200
    gamma: float = 0.99

    tau: float = 0.005
    policy_delay: int = 2
    expl_noise: float = 0.1
    target_noise: float = 0.2
    noise_clip: float = 0.5
    batch_size: int = 256
    lr: float = 3e-4
    warmup_steps: int = 1000
    hidden: list[int] = field(default_factory=lambda: [256, 256])
    replay_capacity: int = 1_000_000

    seeds: list[int] = field(default_factory=lambda: [0])
    total_steps: int = 30_000
    eval_every: int = 2000

    bias_n: int = 256
    bias_cadence: int = 5000
    bias_horizon: int = 1000

    out_dir: str = "results"

    def validate(self) -> None:
        try:
            self.env_spec()
            self.hyperparams()
            make_rule(
                self.rule,
                beta=self.beta,
                snapshots=self.snapshots,
                total_steps=self.total_steps,
                beta0=self.beta0,
                alpha=self.alpha,
            )
        except ValueError as e:
            raise ConfigError(str(e)) from e
        if self.rule not in RULES:
            raise ConfigError(f"unknown rule {self.rule!r}")
        if self.env != "pendulum":
            raise ConfigError(f"unknown environment {self.env!r}")
        if not self.seeds:
            raise ConfigError("seeds must be a nonempty list")
        if self.total_steps < 0:
            raise ConfigError("total_steps must be nonnegative")
        if self.eval_every < 1 or self.bias_cadence < 1:
            raise ConfigError("cadences must be positive")
        if self.bias_n < 1:
            raise ConfigError("bias_n must be positive")
        if len(self.hidden) < 1:
            raise ConfigError("hidden must list at least one layer width")

    def env_spec(self) -> EnvSpec:
        return EnvSpec(
            max_episode_steps=self.max_episode_steps,
            nu=self.nu,
            gamma=self.gamma,
        )

    def hyperparams(self) -> Hyperparams:
        return Hyperparams(
            gamma=self.gamma,
            tau=self.tau,
            policy_delay=self.policy_delay,
            expl_noise=self.expl_noise,
            target_noise=self.target_noise,
            noise_clip=self.noise_clip,
            batch_size=self.batch_size,
            lr=self.lr,
            warmup_steps=self.warmup_steps,
            hidden=tuple(self.hidden),
            replay_capacity=self.replay_capacity,
        )

    def make_rule(self):
        return make_rule(
            self.rule,
            beta=self.beta,
            snapshots=self.snapshots,
            total_steps=self.total_steps,
            beta0=self.beta0,
            alpha=self.alpha,
        )

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


# Desk-scale presets: small networks and batches so multi-seed sweeps run in
# minutes on one core; rule-specific fields on top.
_DESK = {
    "hidden": [128, 128],
    "batch_size": 100,
    "warmup_steps": 1000,
    "eval_every": 2000,
}

PRESETS: dict[str, dict] = {
    "ddpg": {**_DESK, "rule": "ddpg"},
    "td3": {**_DESK, "rule": "clipped_double"},
    "wd3": {**_DESK, "rule": "wd3", "beta": 0.5},
    "tadd": {**_DESK, "rule": "tadd", "beta": 0.5, "snapshots": 3},
    "tcd3": {**_DESK, "rule": "tcd3"},
    "swtd3": {**_DESK, "rule": "swt"},
}


def config_from_dict(data: dict) -> ExperimentConfig:
    """Build a validated config; rejects unknown keys, expands presets."""
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    data = dict(data)
    preset = data.pop("preset", None)
    merged: dict = {}
    if preset is not None:
        if preset not in PRESETS:
            raise ConfigError(
                f"unknown preset {preset!r}; available: {sorted(PRESETS)}"
            )
        merged.update(PRESETS[preset])
    merged.update(data)
    known = {f.name for f in dataclasses.fields(ExperimentConfig)}
    unknown = set(merged) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    cfg = ExperimentConfig(**merged)
    cfg.validate()
    return cfg


def load_config(path) -> ExperimentConfig:
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e}") from e
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"invalid JSON in {path}: {e}") from e
    return config_from_dict(data)


def save_config(cfg: ExperimentConfig, path) -> None:
    Path(path).write_text(json.dumps(cfg.to_dict(), indent=2, sort_keys=True) + "\n")
