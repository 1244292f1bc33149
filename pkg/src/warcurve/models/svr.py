"""Epsilon-insensitive support vector regression with a Gaussian kernel.

The dual is written in the signed coefficients ``beta_i = alpha_i - alpha_i*``::

    minimize   1/2 beta^T K beta - y^T beta + eps * sum |beta_i|
    subject to sum beta_i = 0,  -C <= beta_i <= C

and solved by repeatedly optimizing the maximally violating pair exactly.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .base import FittedModel, register

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SvrHyperparams:
    epsilon: float = 0.1
    C: float = 1.0
    gamma: float = 0.1
    tol: float = 1e-3
    max_iter: int = 100_000

    def __post_init__(self):
        if not (self.epsilon > 0 and self.C > 0 and self.gamma > 0):
            raise ValueError("epsilon, C and gamma must all be positive")


def rbf_kernel(A, B, gamma):
    """``exp(-gamma * |a - b|^2)`` for every row pair."""
    A = np.atleast_2d(np.asarray(A, dtype=float))
    B = np.atleast_2d(np.asarray(B, dtype=float))
    sq = (A * A).sum(1)[:, None] + (B * B).sum(1)[None, :] - 2.0 * A @ B.T
    return np.exp(-gamma * np.maximum(sq, 0.0))


def dual_objective(beta, K, y, epsilon):
    return 0.5 * beta @ K @ beta - y @ beta + epsilon * np.abs(beta).sum()


def _sign(v):
    return (v > 0) - (v < 0)


def _pair_step(bi, bj, gi, gj, eta, eps, C):
    """Exact minimizer of the dual along beta_i += t, beta_j -= t."""
    bi, bj, gi, gj = float(bi), float(bj), float(gi), float(gj)
    lo = max(-C - bi, bj - C)
    hi = min(C - bi, bj + C)
    dg = gi - gj

    def phi(t):
        return 0.5 * eta * t * t + dg * t + eps * (abs(bi + t) + abs(bj - t))

    knots = sorted({lo, hi, *(k for k in (-bi, bj) if lo < k < hi)})
    candidates = list(knots)
    for a, b in zip(knots[:-1], knots[1:]):
        mid = 0.5 * (a + b)
        slope0 = dg + eps * (_sign(bi + mid) - _sign(bj - mid))
        if eta > 0:
            candidates.append(min(max(-slope0 / eta, a), b))
    # first minimum wins, as with argmin
    return min(candidates, key=phi)


def _violators(beta, g, eps, C):
    up = g + np.where(beta >= 0, eps, -eps)     # slope when raising beta_i
    low = g + np.where(beta > 0, eps, -eps)     # slope when lowering beta_j
    up = np.where(beta < C, up, np.inf)
    low = np.where(beta > -C, low, -np.inf)
    return up, low


@register("svr")
class SvrModel(FittedModel):
    _params = ("support_vectors", "dual_coef", "bias", "gamma")

    def __init__(self, support_vectors, dual_coef, bias, gamma, **kw):
        super().__init__(**kw)
        self.support_vectors = np.asarray(support_vectors, dtype=float)
        self.dual_coef = np.asarray(dual_coef, dtype=float)
        self.bias = float(bias)
        self.gamma = float(gamma)

    n_inputs: int = 0

    @property
    def n_features(self):
        return self.support_vectors.shape[1] if self.support_vectors.size else self.n_inputs

    def _predict(self, X):
        if self.dual_coef.size == 0:
            return np.full(X.shape[0], self.bias)
        return rbf_kernel(X, self.support_vectors, self.gamma) @ self.dual_coef + self.bias

    def to_dict(self):
        d = super().to_dict()
        d["params"]["n_inputs"] = self.n_features
        return d

    @classmethod
    def _from_state(cls, state):
        sv = np.asarray(state["support_vectors"], dtype=float).reshape(-1, state["n_inputs"])
        model = cls(sv, state["dual_coef"], state["bias"], state["gamma"])
        model.n_inputs = state["n_inputs"]
        return model


@dataclass
class DualSolution:
    beta: np.ndarray
    bias: float
    iterations: int
    converged: bool
    gap: float


def solve_dual(K, y, epsilon, C, tol=1e-3, max_iter=100_000):
    """Pairwise coordinate descent on the signed dual until the KKT gap is <= tol."""
    n = len(y)
    beta = np.zeros(n)
    g = -np.asarray(y, dtype=float)  # K beta - y
    diag = np.diag(K)
    converged = False
    it = 0
    gap = np.inf
    for it in range(max_iter + 1):
        up, low = _violators(beta, g, epsilon, C)
        i = int(np.argmin(up))
        j = int(np.argmax(low))
        gap = low[j] - up[i]
        if gap <= tol:
            converged = True
            break
        if it == max_iter:
            break
        eta = diag[i] + diag[j] - 2.0 * K[i, j]
        t = _pair_step(beta[i], beta[j], g[i], g[j], max(eta, 1e-12), epsilon, C)
        if t == 0.0:
            # no progress possible along this pair
            logger.debug("zero step on pair (%d, %d)", i, j)
            break
        beta[i] += t
        beta[j] -= t
        g += t * (K[:, i] - K[:, j])
    up, low = _violators(beta, g, epsilon, C)
    finite_up = up[np.isfinite(up)]
    finite_low = low[np.isfinite(low)]
    hi = finite_up.min() if finite_up.size else finite_low.max()
    lo = finite_low.max() if finite_low.size else hi
    bias = -0.5 * (hi + lo)
    return DualSolution(beta, bias, it, converged, float(gap))


def fit_svr(X, y, hyper: SvrHyperparams = SvrHyperparams(), seed=0, feature_names=None):
    """Fit the RBF epsilon-SVR; hitting the iteration cap sets ``converged=False``.

    ``seed`` is recorded for provenance only; the solver is deterministic.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    if X.shape[0] != y.shape[0] or y.shape[0] < 1:
        raise ValueError("X and y need the same, non-zero number of rows")
    K = rbf_kernel(X, X, hyper.gamma)
    sol = solve_dual(K, y, hyper.epsilon, hyper.C, hyper.tol, hyper.max_iter)
    if not sol.converged:
        logger.info("svr not converged after %d iterations (gap %.3g)", sol.iterations, sol.gap)
    support = np.flatnonzero(sol.beta != 0.0)
    model = SvrModel(X[support], sol.beta[support], sol.bias, hyper.gamma,
                     feature_names=feature_names,
                     hyperparams={"epsilon": hyper.epsilon, "C": hyper.C, "gamma": hyper.gamma},
                     seed=seed, converged=sol.converged)
    model.n_inputs = X.shape[1]
    model.dual_solution = sol
    return model
