"""Minimal dense-network engine: forward, exact gradients, Adam, Polyak.

Everything is float64 numpy. Networks are plain parameter containers; the
functions below do the work. Hidden layers use the rectifier; the output is
either linear (critics) or a tanh squashed into an action box (actors).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


@dataclass
class NetworkParams:
    """Layered dense network: y = act(x W + b) chained per layer.

    weights[i] has shape (in_i, out_i); consecutive layers must chain.
    output_low/output_high, when set, bound the output via a scaled tanh.
    """

    weights: list[np.ndarray]
    biases: list[np.ndarray]
    output_low: np.ndarray | None = None
    output_high: np.ndarray | None = None

    def __post_init__(self):
        for i in range(len(self.weights) - 1):
            if self.weights[i].shape[1] != self.weights[i + 1].shape[0]:
                raise ValueError("layer dimensions do not chain")
        for w, b in zip(self.weights, self.biases):
            if b.shape != (w.shape[1],):
                raise ValueError("bias shape does not match weight")

    @property
    def bounded(self) -> bool:
        return self.output_low is not None

    @property
    def in_dim(self) -> int:
        return self.weights[0].shape[0]

    @property
    def out_dim(self) -> int:
        return self.weights[-1].shape[1]

    def copy(self) -> "NetworkParams":
        return NetworkParams(
            [w.copy() for w in self.weights],
            [b.copy() for b in self.biases],
            None if self.output_low is None else self.output_low.copy(),
            None if self.output_high is None else self.output_high.copy(),
        )


def init_network(
    sizes: list[int],
    rng: np.random.Generator,
    output_low=None,
    output_high=None,
) -> NetworkParams:
    """Uniform fan-in initialization, bound 1/sqrt(fan_in) per layer."""
    weights, biases = [], []
    for n_in, n_out in zip(sizes[:-1], sizes[1:]):
        bound = 1.0 / math.sqrt(n_in)
        weights.append(rng.uniform(-bound, bound, size=(n_in, n_out)))
        biases.append(rng.uniform(-bound, bound, size=n_out))
    low = None if output_low is None else np.asarray(output_low, dtype=float)
    high = None if output_high is None else np.asarray(output_high, dtype=float)
    return NetworkParams(weights, biases, low, high)


def _as_batch(x: np.ndarray) -> tuple[np.ndarray, bool]:
    x = np.asarray(x, dtype=float)
    if x.ndim == 1:
        return x[None, :], True
    return x, False


def _squash(net: NetworkParams, z: np.ndarray) -> np.ndarray:
    center = 0.5 * (net.output_high + net.output_low)
    half = 0.5 * (net.output_high - net.output_low)
    return center + half * np.tanh(z)


def forward(net: NetworkParams, x: np.ndarray) -> np.ndarray:
    """Evaluate the network on a sample (1-D) or a batch (2-D)."""
    h, single = _as_batch(x)
    if h.shape[1] != net.in_dim:
        raise ValueError(f"input width {h.shape[1]} != {net.in_dim}")
    last = len(net.weights) - 1
    for i, (w, b) in enumerate(zip(net.weights, net.biases)):
        h = h @ w + b
        if i < last:
            h = np.maximum(h, 0.0)
    if net.bounded:
        h = _squash(net, h)
    return h[0] if single else h


def _forward_cache(net: NetworkParams, x: np.ndarray):
    """Forward pass keeping per-layer inputs and pre-activations."""
    inputs = []
    h = x
    last = len(net.weights) - 1
    pre_out = None
    for i, (w, b) in enumerate(zip(net.weights, net.biases)):
        inputs.append(h)
        z = h @ w + b
        if i < last:
            h = np.maximum(z, 0.0)
        else:
            pre_out = z
            h = _squash(net, z) if net.bounded else z
    return h, inputs, pre_out


def _backward(net: NetworkParams, inputs, pre_out, d_out):
    """Backprop an upstream gradient; returns (param grads, input grad)."""
    if net.bounded:
        half = 0.5 * (net.output_high - net.output_low)
        d = d_out * half * (1.0 - np.tanh(pre_out) ** 2)
    else:
        d = d_out
    grad_w = [None] * len(net.weights)
    grad_b = [None] * len(net.biases)
    for i in range(len(net.weights) - 1, -1, -1):
        grad_w[i] = inputs[i].T @ d
        grad_b[i] = d.sum(axis=0)
        d = d @ net.weights[i].T
        if i > 0:
            d = d * (inputs[i] > 0.0)
    return grad_w, grad_b, d


def grad_mse(net: NetworkParams, x: np.ndarray, targets: np.ndarray):
    """Gradient of the mean squared error over a batch.

    Returns ((grad_weights, grad_biases), loss).
    """
    x = np.asarray(x, dtype=float)
    t = np.asarray(targets, dtype=float)
    if t.ndim == 1:
        t = t[:, None]
    if x.shape[0] != t.shape[0]:
        raise ValueError("inputs and targets batch lengths differ")
    y, inputs, pre_out = _forward_cache(net, x)
    err = y - t
    loss = float(np.mean(err**2))
    d_out = 2.0 * err / err.size
    gw, gb, _ = _backward(net, inputs, pre_out, d_out)
    return (gw, gb), loss


def grad_critic_action(critic: NetworkParams, states, actions):
    """d(mean Q)/d(action) for a critic taking concat(state, action)."""
    x = np.concatenate([states, actions], axis=1)
    y, inputs, pre_out = _forward_cache(critic, x)
    d_out = np.full_like(y, 1.0 / y.shape[0])
    _, _, d_in = _backward(critic, inputs, pre_out, d_out)
    return d_in[:, states.shape[1]:], float(np.mean(y))


def grad_dpg(actor: NetworkParams, critic: NetworkParams, states: np.ndarray):
    """Gradient of mean Q(s, pi(s)) with respect to the actor parameters.

    The critic is held fixed. Returns ((grad_weights, grad_biases), mean_q);
    ascending this gradient improves the actor objective.
    """
    states = np.asarray(states, dtype=float)
    actions, a_inputs, a_pre = _forward_cache(actor, states)
    if actions.shape[1] + states.shape[1] != critic.in_dim:
        raise ValueError("actor output width does not match critic input")
    d_action, mean_q = grad_critic_action(critic, states, actions)
    gw, gb, _ = _backward(actor, a_inputs, a_pre, d_action)
    return (gw, gb), mean_q


@dataclass
class AdamState:
    """Bias-corrected Adam moments mirroring a network's parameters."""

    m_w: list[np.ndarray]
    v_w: list[np.ndarray]
    m_b: list[np.ndarray]
    v_b: list[np.ndarray]
    step: int = 0
    lr: float = 3e-4
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8

    @classmethod
    def for_network(cls, net: NetworkParams, lr: float = 3e-4) -> "AdamState":
        return cls(
            [np.zeros_like(w) for w in net.weights],
            [np.zeros_like(w) for w in net.weights],
            [np.zeros_like(b) for b in net.biases],
            [np.zeros_like(b) for b in net.biases],
            lr=lr,
        )


def adam_step(net: NetworkParams, grads, state: AdamState) -> None:
    """One Adam descent step in place; increments the step counter."""
    gw, gb = grads
    for g in gw + gb:
        if not np.all(np.isfinite(g)):
            raise ValueError("nonfinite gradient entries")
    state.step += 1
    c1 = 1.0 - state.beta1**state.step
    c2 = 1.0 - state.beta2**state.step
    for params, grads_, m, v in (
        (net.weights, gw, state.m_w, state.v_w),
        (net.biases, gb, state.m_b, state.v_b),
    ):
        for p, g, mi, vi in zip(params, grads_, m, v):
            mi *= state.beta1
            mi += (1.0 - state.beta1) * g
            vi *= state.beta2
            vi += (1.0 - state.beta2) * g * g
            p -= state.lr * (mi / c1) / (np.sqrt(vi / c2) + state.eps)


def soft_update(target: NetworkParams, source: NetworkParams, tau: float) -> None:
    """Polyak averaging: target <- tau * source + (1 - tau) * target."""
    if not 0.0 <= tau <= 1.0:
        raise ValueError("tau must lie in [0, 1]")
    for tw, sw in zip(target.weights, source.weights):
        tw *= 1.0 - tau
        tw += tau * sw
    for tb, sb in zip(target.biases, source.biases):
        tb *= 1.0 - tau
        tb += tau * sb


def negate_grads(grads):
    gw, gb = grads
    return ([-g for g in gw], [-g for g in gb])


def save_networks(path, nets: dict[str, NetworkParams]) -> None:
    """Snapshot named networks to a single .npz file."""
    arrays = {}
    for name, net in nets.items():
        for i, (w, b) in enumerate(zip(net.weights, net.biases)):
            arrays[f"{name}/w{i}"] = w
            arrays[f"{name}/b{i}"] = b
        if net.bounded:
            arrays[f"{name}/low"] = net.output_low
            arrays[f"{name}/high"] = net.output_high
    np.savez(path, **arrays)


def load_networks(path) -> dict[str, NetworkParams]:
    data = np.load(path)
    names = sorted({k.split("/")[0] for k in data.files})
    nets = {}
    for name in names:
        weights, biases = [], []
        i = 0
        while f"{name}/w{i}" in data:
            weights.append(data[f"{name}/w{i}"])
            biases.append(data[f"{name}/b{i}"])
            i += 1
        low = data[f"{name}/low"] if f"{name}/low" in data else None
        high = data[f"{name}/high"] if f"{name}/high" in data else None
        nets[name] = NetworkParams(weights, biases, low, high)
    return nets
