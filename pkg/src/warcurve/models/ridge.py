"""L2-regularized linear regression solved in closed form."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..numerics import NotPositiveDefiniteError, solve_spd
from .base import FittedModel, register


@dataclass(frozen=True)
class RidgeHyperparams:
    # Penalty on the squared coefficients inside the 1/(2m) bracket of the
    # cost; the 1/(2m) factor cancels, so lam is the plain penalty weight.
    lam: float = 1.0

    def __post_init__(self):
        if not np.isfinite(self.lam) or self.lam < 0:
            raise ValueError("lambda must be finite and >= 0")


@register("ridge")
class RidgeModel(FittedModel):
    _params = ("intercept", "coef")

    def __init__(self, intercept, coef, **kw):
        super().__init__(**kw)
        self.intercept = float(intercept)
        self.coef = np.asarray(coef, dtype=float)

    @property
    def n_features(self):
        return self.coef.size

    def _predict(self, X):
        return self.intercept + X @ self.coef

    @classmethod
    def _from_state(cls, state):
        return cls(state["intercept"], state["coef"])


def ridge_cost(theta, X, y, lam):
    """Cost ``(1/2m)[sum residual^2 + lam * sum coef^2]``; theta[0] is the intercept."""
    m = len(y)
    resid = theta[0] + X @ theta[1:] - y
    return (resid @ resid + lam * theta[1:] @ theta[1:]) / (2 * m)


def ridge_gradient(theta, X, y, lam):
    m = len(y)
    resid = theta[0] + X @ theta[1:] - y
    grad = np.empty_like(theta)
    grad[0] = resid.sum() / m
    grad[1:] = (X.T @ resid + lam * theta[1:]) / m
    return grad


def fit_ridge(X, y, hyper: RidgeHyperparams | float = RidgeHyperparams(), feature_names=None):
    """Minimize the ridge cost with an unpenalized intercept.

    Solves the normal equations ``(A^T A + lam I') theta = A^T y`` where
    ``A = [1 | X]`` and ``I'`` is the identity with a zero in the intercept slot.
    """
    if not isinstance(hyper, RidgeHyperparams):
        hyper = RidgeHyperparams(float(hyper))
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    if X.shape[0] != y.shape[0] or y.shape[0] < 1:
        raise ValueError("X and y need the same, non-zero number of rows")
    A = np.column_stack([np.ones(len(y)), X])
    gram = A.T @ A
    penalty = np.full(A.shape[1], hyper.lam)
    penalty[0] = 0.0
    gram[np.diag_indices_from(gram)] += penalty
    try:
        theta = solve_spd(gram, A.T @ y)
    except NotPositiveDefiniteError:
        raise NotPositiveDefiniteError("singular; increase lambda") from None
    return RidgeModel(theta[0], theta[1:], feature_names=feature_names,
                      hyperparams={"lam": hyper.lam})
