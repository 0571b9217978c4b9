"""Minimal dense Q-network trained by hand: forward pass, backprop, Adam.

Hidden layers are ReLU, the output layer is linear (one Q-value per
action). The only loss in play is squared error on the Q-value of the taken
action, so gradients are masked to that action.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass
class QNetwork:
    weights: list  # per layer, shape (fan_in, fan_out)
    biases: list  # per layer, shape (fan_out,)

    @property
    def layer_sizes(self) -> list[int]:
        return [self.weights[0].shape[0]] + [w.shape[1] for w in self.weights]


def init_network(layer_sizes: list[int], rng: np.random.Generator) -> QNetwork:
    """Glorot-uniform weights, zero biases."""
    if len(layer_sizes) < 2:
        raise ValueError("need at least input and output sizes")
    weights, biases = [], []
    for fan_in, fan_out in zip(layer_sizes[:-1], layer_sizes[1:]):
        limit = np.sqrt(6.0 / (fan_in + fan_out))
        weights.append(rng.uniform(-limit, limit, size=(fan_in, fan_out)))
        biases.append(np.zeros(fan_out))
    return QNetwork(weights=weights, biases=biases)


def copy_network(net: QNetwork) -> QNetwork:
    return QNetwork(weights=[w.copy() for w in net.weights], biases=[b.copy() for b in net.biases])


def forward(net: QNetwork, x: np.ndarray) -> np.ndarray:
    """Q-values for one input (1-D) or a batch (2-D)."""
    a = np.asarray(x, dtype=np.float64)
    single = a.ndim == 1
    if single:
        a = a[None, :]
    last = len(net.weights) - 1
    for i, (w, b) in enumerate(zip(net.weights, net.biases)):
        a = a @ w + b
        if i != last:
            a = np.maximum(a, 0.0)
    return a[0] if single else a


def _forward_cached(net: QNetwork, x: np.ndarray):
    activations = [x]
    pre = []
    last = len(net.weights) - 1
    a = x
    for i, (w, b) in enumerate(zip(net.weights, net.biases)):
        z = a @ w + b
        pre.append(z)
        a = z if i == last else np.maximum(z, 0.0)
        activations.append(a)
    return pre, activations


def batch_gradient(
    net: QNetwork, xs: np.ndarray, actions: np.ndarray, targets: np.ndarray
) -> tuple[list, list]:
    """Gradients of the mean masked squared error over a batch.

    xs (B, in), actions (B,) int, targets (B,). Only the Q-value of the
    taken action enters each sample's loss.
    """
    xs = np.asarray(xs, dtype=np.float64)
    actions = np.asarray(actions, dtype=np.intp)
    targets = np.asarray(targets, dtype=np.float64)
    batch = xs.shape[0]
    pre, acts = _forward_cached(net, xs)
    q = acts[-1]

    g = np.zeros_like(q)
    rows = np.arange(batch)
    g[rows, actions] = 2.0 * (q[rows, actions] - targets) / batch

    grads_w = [None] * len(net.weights)
    grads_b = [None] * len(net.biases)
    for layer in range(len(net.weights) - 1, -1, -1):
        grads_w[layer] = acts[layer].T @ g
        grads_b[layer] = g.sum(axis=0)
        if layer > 0:
            g = (g @ net.weights[layer].T) * (pre[layer - 1] > 0.0)
    return grads_w, grads_b


def gradient(net: QNetwork, x: np.ndarray, action: int, target: float) -> tuple[list, list]:
    """Single-sample gradients of (target - Q(x)[action])^2."""
    return batch_gradient(
        net, np.asarray(x, dtype=np.float64)[None, :], np.array([action]), np.array([target])
    )


@dataclass
class AdamState:
    lr: float = 0.001
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    t: int = 0
    m_w: list = field(default_factory=list)
    v_w: list = field(default_factory=list)
    m_b: list = field(default_factory=list)
    v_b: list = field(default_factory=list)


def init_adam(net: QNetwork, lr: float = 0.001) -> AdamState:
    return AdamState(
        lr=lr,
        m_w=[np.zeros_like(w) for w in net.weights],
        v_w=[np.zeros_like(w) for w in net.weights],
        m_b=[np.zeros_like(b) for b in net.biases],
        v_b=[np.zeros_like(b) for b in net.biases],
    )


def adam_step(adam: AdamState, net: QNetwork, grads_w: list, grads_b: list) -> QNetwork:
    """One bias-corrected Adam update, applied in place."""
    if len(grads_w) != len(net.weights) or len(grads_b) != len(net.biases):
        raise ValueError("gradient/parameter layer count mismatch")
    adam.t += 1
    c1 = 1.0 - adam.beta1**adam.t
    c2 = 1.0 - adam.beta2**adam.t
    for params, grads, ms, vs in (
        (net.weights, grads_w, adam.m_w, adam.v_w),
        (net.biases, grads_b, adam.m_b, adam.v_b),
    ):
        for p, g, m, v in zip(params, grads, ms, vs):
            if p.shape != g.shape:
                raise ValueError("gradient shape mismatch")
            m *= adam.beta1
            m += (1.0 - adam.beta1) * g
            v *= adam.beta2
            v += (1.0 - adam.beta2) * np.square(g)
            p -= adam.lr * (m / c1) / (np.sqrt(v / c2) + adam.eps)
    return net
