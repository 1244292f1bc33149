"""Fully connected ReLU network regressor trained with L-BFGS."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..numerics import OptimizerConfig, lbfgs_minimize, seeded_stream
from .base import FittedModel, register


@dataclass(frozen=True)
class MlpHyperparams:
    alpha: float = 1e-2
    layer1: int = 8
    layer2: int = 0  # 0 means a single hidden layer
    max_iterations: int = 500

    def __post_init__(self):
        if self.layer1 < 1 or self.layer2 < 0:
            raise ValueError("layer1 must be >= 1 and layer2 >= 0")
        if not np.isfinite(self.alpha) or self.alpha < 0:
            raise ValueError("alpha must be finite and >= 0")

    def layer_sizes(self, n_inputs):
        hidden = [self.layer1] + ([self.layer2] if self.layer2 > 0 else [])
        return [n_inputs] + hidden + [1]


def _shapes(sizes):
    return [(a, b) for a, b in zip(sizes[:-1], sizes[1:])]


def n_parameters(sizes):
    return sum(a * b + b for a, b in _shapes(sizes))


def unpack(theta, sizes):
    """Split a flat parameter vector into per-layer (weights, biases)."""
    layers = []
    pos = 0
    for a, b in _shapes(sizes):
        W = theta[pos:pos + a * b].reshape(a, b)
        pos += a * b
        layers.append((W, theta[pos:pos + b]))
        pos += b
    return layers


def forward(layers, X):
    h = X
    for W, c in layers[:-1]:
        h = np.maximum(h @ W + c, 0.0)
    W, c = layers[-1]
    return (h @ W + c)[:, 0]


def mlp_loss_and_grad(theta, X, y, sizes, alpha):
    """Loss ``(1/2m)[sum residual^2 + alpha * sum W^2]`` and its gradient.

    Biases are not penalized.
    """
    m = X.shape[0]
    layers = unpack(theta, sizes)
    acts = [X]
    for W, c in layers[:-1]:
        acts.append(np.maximum(acts[-1] @ W + c, 0.0))
    W_out, c_out = layers[-1]
    out = (acts[-1] @ W_out + c_out)[:, 0]
    resid = out - y
    penalty = sum(float(np.sum(W * W)) for W, _ in layers)
    loss = (resid @ resid + alpha * penalty) / (2 * m)

    grads = []
    delta = resid[:, None] / m
    for idx in range(len(layers) - 1, -1, -1):
        W, _ = layers[idx]
        grads.append((acts[idx].T @ delta + alpha * W / m, delta.sum(axis=0)))
        if idx > 0:
            delta = (delta @ W.T) * (acts[idx] > 0)
    grads.reverse()
    flat = np.concatenate([np.concatenate([gW.ravel(), gc]) for gW, gc in grads])
    return loss, flat


def init_parameters(sizes, rng):
    parts = []
    for a, b in _shapes(sizes):
        bound = np.sqrt(6.0 / (a + b))
        parts.append(rng.uniform(-bound, bound, size=a * b))
        parts.append(np.zeros(b))
    return np.concatenate(parts)


@register("mlp")
class MlpModel(FittedModel):
    _params = ("sizes", "theta")

    def __init__(self, sizes, theta, **kw):
        super().__init__(**kw)
        self.sizes = [int(s) for s in sizes]
        self.theta = np.asarray(theta, dtype=float)

    @property
    def n_features(self):
        return self.sizes[0]

    @property
    def n_hidden_layers(self):
        return len(self.sizes) - 2

    def _predict(self, X):
        return forward(unpack(self.theta, self.sizes), X)

    @classmethod
    def _from_state(cls, state):
        return cls(state["sizes"], state["theta"])


def fit_mlp(X, y, hyper: MlpHyperparams = MlpHyperparams(), seed=0, feature_names=None):
    """Train the network; a run that hits the iteration cap is flagged, not fatal."""
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    if X.shape[0] != y.shape[0] or y.shape[0] < 1:
        raise ValueError("X and y need the same, non-zero number of rows")
    sizes = hyper.layer_sizes(X.shape[1])
    theta0 = init_parameters(sizes, seeded_stream(seed, "mlp-init"))

    def objective(theta):
        return mlp_loss_and_grad(theta, X, y, sizes, hyper.alpha)

    result = lbfgs_minimize(objective, theta0,
                            OptimizerConfig(max_iterations=hyper.max_iterations,
                                            gradient_tolerance=1e-6))
    if not np.isfinite(result.fun):
        raise FloatingPointError("non-finite training loss")
    return MlpModel(sizes, result.x, feature_names=feature_names,
                    hyperparams={"alpha": hyper.alpha, "layer1": hyper.layer1,
                                 "layer2": hyper.layer2},
                    seed=seed, converged=result.converged)
