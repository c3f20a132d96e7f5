"""Closed-form expected errors of order-statistic critic targets.

Critic estimation errors are modelled as correlated Gaussians with a common
pairwise correlation. The functions here give the expected value of the
min/max combinations that the different target rules apply to those errors,
plus a Monte Carlo oracle to verify every closed form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

SQRT_2PI = math.sqrt(2.0 * math.pi)

_STATISTIC_ARITY = {"min2": 2, "max2": 2, "max3": 3, "min_max": 3}


@dataclass(frozen=True)
class CorrelatedGaussianSpec:
    """Two or three Gaussians with common pairwise correlation."""

    mu: tuple[float, ...]
    sigma: tuple[float, ...]
    rho: float

    def __post_init__(self):
        if len(self.mu) not in (2, 3):
            raise ValueError("spec must have 2 or 3 entries")
        if len(self.mu) != len(self.sigma):
            raise ValueError("mu and sigma must have equal length")
        if any(s <= 0 for s in self.sigma):
            raise ValueError("all sigma must be strictly positive")
        if not -1.0 <= self.rho <= 1.0:
            raise ValueError("rho must lie in [-1, 1]")

    def __len__(self) -> int:
        return len(self.mu)

    def correlation_matrix(self) -> np.ndarray:
        k = len(self)
        c = np.full((k, k), self.rho)
        np.fill_diagonal(c, 1.0)
        return c


@dataclass(frozen=True)
class BiasReport:
    """Expected error of one target rule at pooled deviation theta."""

    rule_name: str
    expected_error: float
    theta: float

    def __post_init__(self):
        if self.theta < 0:
            raise ValueError("theta must be nonnegative")


def theta_of(s1: float, s2: float, rho: float) -> float:
    """Standard deviation of the difference of two correlated Gaussians."""
    if s1 <= 0 or s2 <= 0:
        raise ValueError("standard deviations must be positive")
    if not -1.0 <= rho <= 1.0:
        raise ValueError("rho must lie in [-1, 1]")
    # clamp tiny negative round-off (e.g. s1 == s2, rho == 1)
    return math.sqrt(max(s1 * s1 + s2 * s2 - 2.0 * rho * s1 * s2, 0.0))


def std_normal_pdf(x: float) -> float:
    return math.exp(-0.5 * x * x) / SQRT_2PI


def std_normal_cdf(x: float) -> float:
    return 0.5 * math.erfc(-x / math.sqrt(2.0))


def expected_min2(spec: CorrelatedGaussianSpec) -> float:
    """Expected minimum of two correlated Gaussians.

    Falls back to min(mu1, mu2) when the pooled deviation is zero, the
    continuity limit of the general formula.
    """
    if len(spec) != 2:
        raise ValueError("expected_min2 needs a 2-entry spec")
    m1, m2 = spec.mu
    th = theta_of(spec.sigma[0], spec.sigma[1], spec.rho)
    if th == 0.0:
        return min(m1, m2)
    z = (m1 - m2) / th
    return m2 + (m1 - m2) * std_normal_cdf(-z) - th * std_normal_pdf(z)


def expected_min2_equal_means(mu: float, theta: float) -> float:
    """Equal-means specialization: mu - theta / sqrt(2 pi)."""
    _check_theta(theta)
    return mu - theta / SQRT_2PI


def expected_max2_equal_means(mu: float, theta: float) -> float:
    """Equal-means expected maximum of two: mu + theta / sqrt(2 pi)."""
    _check_theta(theta)
    return mu + theta / SQRT_2PI


def expected_max3_equal_means(mu: float, theta: float) -> float:
    """Equal-means, equal-pairwise-theta expected maximum of three."""
    _check_theta(theta)
    return mu + 3.0 * theta / (2.0 * SQRT_2PI)


def expected_tcu_error(mu: float, theta: float) -> float:
    """Expected min(max(N1, N2), N3) for equal means and pairwise theta.

    Equals the midpoint between the clipped-double expectation and mu.
    """
    _check_theta(theta)
    return mu - theta / (2.0 * SQRT_2PI)


def expected_weighted_error(beta: float, mu: float, theta: float) -> float:
    """Expected error of a beta-weighted min/average combination.

    The same expression covers both the weighted-average and the
    snapshot-averaged third-critic variants: mu - beta * theta / sqrt(2 pi).
    """
    if not 0.0 <= beta <= 1.0:
        raise ValueError("beta must lie in [0, 1]")
    _check_theta(theta)
    return mu - beta * theta / SQRT_2PI


def _check_theta(theta: float) -> None:
    if theta < 0:
        raise ValueError("theta must be nonnegative")


def _mixing_matrix(spec: CorrelatedGaussianSpec) -> np.ndarray:
    """Factor L of the correlation matrix with C = L L^T.

    Uses an eigendecomposition so the degenerate rho = +/-1 and rho = -0.5
    boundary cases work; rejects correlation matrices that are not PSD.
    """
    c = spec.correlation_matrix()
    w, v = np.linalg.eigh(c)
    if w.min() < -1e-10:
        raise ValueError(
            f"correlation matrix for rho={spec.rho} with {len(spec)} "
            "variables is not positive semidefinite"
        )
    return v * np.sqrt(np.clip(w, 0.0, None))


def _apply_statistic(x: np.ndarray, statistic: str) -> np.ndarray:
    if statistic == "min2":
        return np.minimum(x[:, 0], x[:, 1])
    if statistic == "max2":
        return np.maximum(x[:, 0], x[:, 1])
    if statistic == "max3":
        return np.max(x, axis=1)
    if statistic == "min_max":
        return np.minimum(np.maximum(x[:, 0], x[:, 1]), x[:, 2])
    raise ValueError(f"unknown statistic {statistic!r}")


def mc_order_stat_oracle(
    spec: CorrelatedGaussianSpec,
    statistic: str,
    n: int,
    seed: int,
    chunk: int = 1_000_000,
) -> tuple[float, float]:
    """Monte Carlo mean and standard error of an order statistic.

    Draws n correlated tuples via a linear mixing of independent standard
    normals, applies the statistic and returns (sample mean, standard error).
    Deterministic given the seed.
    """
    if statistic not in _STATISTIC_ARITY:
        raise ValueError(f"unknown statistic {statistic!r}")
    if len(spec) != _STATISTIC_ARITY[statistic]:
        raise ValueError(
            f"{statistic} needs {_STATISTIC_ARITY[statistic]} entries, "
            f"spec has {len(spec)}"
        )
    if n < 10_000:
        raise ValueError("n must be at least 10^4")
    mix = _mixing_matrix(spec)
    mu = np.asarray(spec.mu)
    sigma = np.asarray(spec.sigma)
    rng = np.random.default_rng(seed)
    total = 0.0
    total_sq = 0.0
    remaining = n
    while remaining > 0:
        m = min(chunk, remaining)
        z = rng.standard_normal((m, len(spec)))
        x = mu + sigma * (z @ mix.T)
        s = _apply_statistic(x, statistic)
        total += float(s.sum())
        total_sq += float(np.dot(s, s))
        remaining -= m
    mean = total / n
    var = max(total_sq / n - mean * mean, 0.0)
    return mean, math.sqrt(var / n)


def mc_rule_error(
    rule: str,
    beta: float,
    spec: CorrelatedGaussianSpec,
    n: int,
    seed: int,
    chunk: int = 1_000_000,
) -> tuple[float, float]:
    """Monte Carlo expected error of a named target rule.

    Accepts a 3-entry spec; rules using only two variables ignore the third.
    Supported rules: ddpg, clipped_double, wd3, tadd, tcd3, swt.
    """
    if len(spec) != 3:
        raise ValueError("mc_rule_error needs a 3-entry spec")
    if not 0.0 <= beta <= 1.0:
        raise ValueError("beta must lie in [0, 1]")
    mix = _mixing_matrix(spec)
    mu = np.asarray(spec.mu)
    sigma = np.asarray(spec.sigma)
    rng = np.random.default_rng(seed)
    total = 0.0
    total_sq = 0.0
    remaining = n
    while remaining > 0:
        m = min(chunk, remaining)
        z = rng.standard_normal((m, 3))
        x = mu + sigma * (z @ mix.T)
        lo = np.minimum(x[:, 0], x[:, 1])
        if rule == "ddpg":
            s = x[:, 0]
        elif rule == "clipped_double":
            s = lo
        elif rule == "wd3":
            s = beta * lo + (1.0 - beta) * 0.5 * (x[:, 0] + x[:, 1])
        elif rule == "tadd":
            s = beta * lo + (1.0 - beta) * x[:, 2]
        elif rule == "tcd3":
            s = np.minimum(np.maximum(x[:, 0], x[:, 1]), x[:, 2])
        elif rule == "swt":
            s = beta * lo + (1.0 - beta) * x[:, 0]
        else:
            raise ValueError(f"unknown rule {rule!r}")
        total += float(s.sum())
        total_sq += float(np.dot(s, s))
        remaining -= m
    mean = total / n
    var = max(total_sq / n - mean * mean, 0.0)
    return mean, math.sqrt(var / n)


def analytic_rule_error(rule: str, beta: float, mu: float, theta: float) -> float:
    """Closed-form expected error of a named target rule at equal means."""
    if rule == "ddpg":
        return mu
    if rule == "clipped_double":
        return expected_min2_equal_means(mu, theta)
    if rule in ("wd3", "tadd", "swt"):
        return expected_weighted_error(beta, mu, theta)
    if rule == "tcd3":
        return expected_tcu_error(mu, theta)
    raise ValueError(f"unknown rule {rule!r}")


def closed_form_report(rule: str, beta: float, mu: float, theta: float) -> BiasReport:
    return BiasReport(rule, analytic_rule_error(rule, beta, mu, theta), theta)
