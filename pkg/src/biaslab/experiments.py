"""Experiment orchestration: seeded runs, CSV artifacts, summaries."""

from __future__ import annotations

import csv
import json
from importlib.metadata import PackageNotFoundError, version
from pathlib import Path

import numpy as np

from . import nets
from .agents import Agent, LogRecord, RngStreams, train
from .bias import BiasRecord, measure_bias
from .config import ExperimentConfig
from .envs import NoisyPendulum
from .gaussian_bias import (
    CorrelatedGaussianSpec,
    analytic_rule_error,
    mc_rule_error,
)

RUN_LOG_HEADER = [
    "step",
    "eval_return",
    "critic1_loss",
    "critic2_loss",
    "beta_lower",
    "beta_sampled_mean",
]
BIAS_HEADER = ["step", "estimated_q", "true_q", "bias", "n"]
CLOSED_FORM_HEADER = ["rule", "beta", "mu", "theta", "analytic", "mc_mean", "mc_se"]
CLOSED_FORM_RULES = ("ddpg", "clipped_double", "wd3", "tadd", "tcd3", "swt")


def _code_version() -> str:
    try:
        return version("biaslab")
    except PackageNotFoundError:
        return "unknown"


def run_dir(cfg: ExperimentConfig, seed: int, out_root: Path | None = None) -> Path:
    root = Path(out_root) if out_root is not None else Path(cfg.out_dir)
    return root / cfg.rule / str(seed)


def _build(cfg: ExperimentConfig, seed: int):
    rngs = RngStreams.from_seed(seed)
    spec = cfg.env_spec()
    agent = Agent(spec, cfg.make_rule(), cfg.hyperparams(), rngs)
    env = NoisyPendulum(spec, rngs.env)
    eval_env = NoisyPendulum(spec, rngs.eval)
    return agent, env, eval_env


def write_run_log(path: Path, log: list[LogRecord]) -> None:
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(RUN_LOG_HEADER)
        for r in log:
            w.writerow(
                [
                    r.step,
                    repr(r.eval_return),
                    repr(r.critic1_loss),
                    repr(r.critic2_loss),
                    repr(r.beta_lower),
                    repr(r.beta_sampled_mean),
                ]
            )


def write_bias_csv(path: Path, records: list[BiasRecord]) -> None:
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(BIAS_HEADER)
        for r in records:
            w.writerow(
                [
                    r.step,
                    repr(r.estimated_q_mean),
                    repr(r.true_q_mean),
                    repr(r.bias),
                    r.n_samples,
                ]
            )


def _write_manifest(d: Path, cfg: ExperimentConfig, seed: int, extra=None) -> None:
    manifest = {
        "config": cfg.to_dict(),
        "seed": seed,
        "code_version": _code_version(),
    }
    if extra:
        manifest.update(extra)
    (d / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")


def run_train(
    cfg: ExperimentConfig, seed: int, out_root: Path | None = None
) -> Path:
    """One seeded training run; writes run_log.csv, checkpoint, manifest."""
    d = run_dir(cfg, seed, out_root)
    d.mkdir(parents=True, exist_ok=True)
    agent, env, eval_env = _build(cfg, seed)
    log = train(agent, env, cfg.total_steps, cfg.eval_every, eval_env)
    write_run_log(d / "run_log.csv", log)
    nets.save_networks(d / "checkpoint.npz", agent.training_networks())
    _write_manifest(d, cfg, seed)
    return d


def run_bias(cfg: ExperimentConfig, seed: int, out_root: Path | None = None) -> Path:
    """Training with interleaved bias measurement; adds a nu-tagged CSV."""
    d = run_dir(cfg, seed, out_root)
    d.mkdir(parents=True, exist_ok=True)
    agent, env, eval_env = _build(cfg, seed)
    records, log = measure_bias(
        agent,
        env,
        cfg.total_steps,
        cfg.bias_n,
        cfg.bias_cadence,
        horizon=cfg.bias_horizon,
        eval_every=cfg.eval_every,
        eval_env=eval_env,
    )
    write_run_log(d / "run_log.csv", log)
    write_bias_csv(d / f"bias_nu{cfg.nu:g}.csv", records)
    nets.save_networks(d / "checkpoint.npz", agent.training_networks())
    _write_manifest(d, cfg, seed)
    return d


def closed_form_rows(
    mus, thetas, betas, mc_n: int = 1_000_000, seed: int = 0
) -> list[list]:
    """Tabulate analytic vs Monte Carlo expected errors for every rule.

    The Monte Carlo spec realizes pairwise deviation theta with independent
    equal-sigma Gaussians (sigma = theta / sqrt(2), rho = 0).
    """
    rows = []
    for mu in mus:
        for theta in thetas:
            if theta <= 0:
                raise ValueError("theta grid values must be positive")
            sigma = theta / np.sqrt(2.0)
            spec = CorrelatedGaussianSpec((mu, mu, mu), (sigma, sigma, sigma), 0.0)
            for beta in betas:
                for rule in CLOSED_FORM_RULES:
                    analytic = analytic_rule_error(rule, beta, mu, theta)
                    mc_mean, mc_se = mc_rule_error(rule, beta, spec, mc_n, seed)
                    rows.append(
                        [rule, beta, mu, theta, analytic, mc_mean, mc_se]
                    )
    return rows


def write_closed_form_csv(path: Path, rows: list[list]) -> None:
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(CLOSED_FORM_HEADER)
        for row in rows:
            w.writerow([row[0]] + [repr(float(v)) for v in row[1:5]]
                       + [repr(float(row[5])), repr(float(row[6]))])


def read_run_log(path: Path) -> list[dict]:
    with open(path, newline="") as f:
        return [
            {k: float(v) if k != "step" else int(v) for k, v in row.items()}
            for row in csv.DictReader(f)
        ]


def summarize_runs(run_dirs: list[Path], last: int = 10):
    """Per rule: mean/std over seeds of the average last-N evaluation returns."""
    by_rule: dict[str, list[float]] = {}
    for d in run_dirs:
        d = Path(d)
        log_path = d / "run_log.csv"
        if not log_path.exists():
            raise FileNotFoundError(f"missing run log: {log_path}")
        rows = read_run_log(log_path)
        if not rows:
            raise ValueError(f"empty run log: {log_path}")
        manifest = json.loads((d / "manifest.json").read_text())
        rule = manifest["config"]["rule"]
        tail = [r["eval_return"] for r in rows[-last:]]
        by_rule.setdefault(rule, []).append(float(np.mean(tail)))
    summary = []
    for rule in sorted(by_rule):
        vals = np.asarray(by_rule[rule])
        summary.append(
            {
                "rule": rule,
                "n_seeds": len(vals),
                "mean": float(vals.mean()),
                "std": float(vals.std(ddof=0)),
            }
        )
    return summary


def discover_run_dirs(paths: list[Path]) -> list[Path]:
    """Accept run dirs directly or parents containing <rule>/<seed> dirs."""
    found = []
    for p in paths:
        p = Path(p)
        if (p / "run_log.csv").exists():
            found.append(p)
        else:
            found.extend(sorted(q.parent for q in p.glob("**/run_log.csv")))
    if not found:
        raise FileNotFoundError(f"no completed runs under {paths}")
    return found


def format_summary_table(summary: list[dict]) -> str:
    header = f"{'rule':<16}{'seeds':>6}{'mean':>14}{'std':>14}"
    lines = [header, "-" * len(header)]
    for s in summary:
        lines.append(
            f"{s['rule']:<16}{s['n_seeds']:>6}{s['mean']:>14.2f}{s['std']:>14.2f}"
        )
    return "\n".join(lines)


def write_summary_csv(path: Path, summary: list[dict]) -> None:
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["rule", "n_seeds", "mean", "std"])
        for s in summary:
            w.writerow([s["rule"], s["n_seeds"], repr(s["mean"]), repr(s["std"])])
