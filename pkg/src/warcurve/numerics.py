"""Dense numeric kernels shared by the models.

Nothing here depends on the baseball side of the package: a Cholesky
solver, a limited-memory BFGS minimizer with a strong-Wolfe line search,
labeled random streams and a central-difference gradient.
"""
from __future__ import annotations

import hashlib
import logging
from dataclasses import dataclass
from typing import Callable

import numpy as np

logger = logging.getLogger(__name__)

ObjectiveWithGradient = Callable[[np.ndarray], "tuple[float, np.ndarray]"]


class NotPositiveDefiniteError(np.linalg.LinAlgError):
    """Raised when a Cholesky pivot is not strictly positive."""


def cholesky(A):
    """Lower-triangular ``L`` with ``L @ L.T == A``."""
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] == 0:
        raise ValueError(f"expected a non-empty square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix has non-finite entries")
    n = A.shape[0]
    L = np.zeros_like(A)
    for j in range(n):
        pivot = A[j, j] - L[j, :j] @ L[j, :j]
        if not pivot > 0.0:
            raise NotPositiveDefiniteError(
                f"not positive definite: pivot {j} is {pivot:.3g}")
        L[j, j] = np.sqrt(pivot)
        if j + 1 < n:
            L[j + 1:, j] = (A[j + 1:, j] - L[j + 1:, :j] @ L[j, :j]) / L[j, j]
    return L


def _forward(L, b):
    y = np.empty_like(b)
    for i in range(L.shape[0]):
        y[i] = (b[i] - L[i, :i] @ y[:i]) / L[i, i]
    return y


def _backward(U, y):
    n = U.shape[0]
    x = np.empty_like(y)
    for i in range(n - 1, -1, -1):
        x[i] = (y[i] - U[i, i + 1:] @ x[i + 1:]) / U[i, i]
    return x


def solve_spd(A, b):
    """Solve ``A x = b`` for symmetric positive-definite ``A``.

    Raises
    ------
    NotPositiveDefiniteError
        If a non-positive pivot shows up during factorization.
    """
    b = np.asarray(b, dtype=float)
    L = cholesky(A)
    if b.shape[0] != L.shape[0]:
        raise ValueError(f"rhs length {b.shape[0]} does not match matrix size {L.shape[0]}")
    return _backward(L.T, _forward(L, b))


def seeded_stream(seed: int, label: str) -> np.random.Generator:
    """Independent, reproducible generator for one labeled consumer.

    The label is hashed into the seed sequence's spawn key, so two labels
    under one run seed never share a stream.
    """
    digest = hashlib.sha256(label.encode("utf-8")).digest()
    key = tuple(int.from_bytes(digest[i:i + 4], "little") for i in range(0, 16, 4))
    return np.random.default_rng(np.random.SeedSequence(entropy=int(seed), spawn_key=key))


def finite_difference_gradient(objective, x, step=1e-6):
    """Central-difference gradient of a scalar ``objective`` at ``x``."""
    if step <= 0:
        raise ValueError("step must be positive")
    x = np.asarray(x, dtype=float)
    grad = np.empty_like(x)
    probe = x.copy()
    for i in range(x.size):
        probe[i] = x[i] + step
        upper = objective(probe)
        probe[i] = x[i] - step
        lower = objective(probe)
        probe[i] = x[i]
        grad[i] = (upper - lower) / (2.0 * step)
    return grad


@dataclass(frozen=True)
class OptimizerConfig:
    memory_pairs: int = 10
    max_iterations: int = 500
    gradient_tolerance: float = 1e-6
    c1: float = 1e-4
    c2: float = 0.9
    max_line_search: int = 40

    def __post_init__(self):
        if not 0.0 < self.c1 < self.c2 < 1.0:
            raise ValueError("line search needs 0 < c1 < c2 < 1")
        if self.memory_pairs < 1 or self.max_iterations < 0:
            raise ValueError("memory_pairs must be >= 1 and max_iterations >= 0")


@dataclass
class OptimizeResult:
    x: np.ndarray
    fun: float
    grad: np.ndarray
    iterations: int
    converged: bool
    message: str


class _NonFinite(Exception):
    pass


def _cubic_min(a, fa, dfa, b, fb, dfb):
    """Minimizer of the cubic interpolating two points and slopes, or None."""
    d1 = dfa + dfb - 3.0 * (fa - fb) / (a - b)
    rad = d1 * d1 - dfa * dfb
    if rad < 0:
        return None
    d2 = np.copysign(np.sqrt(rad), b - a)
    denom = dfb - dfa + 2.0 * d2
    if denom == 0:
        return None
    t = b - (b - a) * (dfb + d2 - d1) / denom
    return t if np.isfinite(t) else None


def _strong_wolfe(phi, f0, d0, step, cfg):
    """Line search along a descent direction; returns (step, f, g) or None.

    ``phi(t)`` gives ``(f, slope, grad)`` at ``x + t p``.  Follows the
    bracketing/zoom scheme of Nocedal and Wright, Algorithms 3.5 and 3.6.
    """
    evaluations = 0

    def probe(t):
        nonlocal evaluations
        evaluations += 1
        for _ in range(30):
            f, slope, g = phi(t)
            if np.isfinite(f) and np.isfinite(slope):
                return t, f, slope, g
            t *= 0.5
        raise _NonFinite("objective stayed non-finite while shrinking the step")

    def zoom(lo, f_lo, d_lo, hi, f_hi, d_hi):
        nonlocal evaluations
        while evaluations < cfg.max_line_search:
            t = _cubic_min(lo, f_lo, d_lo, hi, f_hi, d_hi)
            left, right = min(lo, hi), max(lo, hi)
            margin = 0.1 * (right - left)
            if t is None or not (left + margin <= t <= right - margin):
                t = 0.5 * (lo + hi)
            t, f, slope, g = probe(t)
            if f > f0 + cfg.c1 * t * d0 or f >= f_lo:
                hi, f_hi, d_hi = t, f, slope
            else:
                if abs(slope) <= -cfg.c2 * d0:
                    return t, f, g
                if slope * (hi - lo) >= 0:
                    hi, f_hi, d_hi = lo, f_lo, d_lo
                lo, f_lo, d_lo = t, f, slope
            if abs(hi - lo) < 1e-16 * max(1.0, abs(lo)):
                break
        if f_lo < f0:
            return lo, *phi(lo)[::2]
        return None

    prev_t, prev_f, prev_d = 0.0, f0, d0
    t = step
    while evaluations < cfg.max_line_search:
        t, f, slope, g = probe(t)
        if f > f0 + cfg.c1 * t * d0 or (evaluations > 1 and f >= prev_f):
            return zoom(prev_t, prev_f, prev_d, t, f, slope)
        if abs(slope) <= -cfg.c2 * d0:
            return t, f, g
        if slope >= 0:
            return zoom(t, f, slope, prev_t, prev_f, prev_d)
        prev_t, prev_f, prev_d = t, f, slope
        t *= 2.0
    return None


def lbfgs_minimize(fun: ObjectiveWithGradient, x0, config: OptimizerConfig | None = None):
    """Minimize a smooth function with limited-memory BFGS.

    Parameters
    ----------
    fun : callable
        Maps a parameter vector to ``(value, gradient)``.
    x0 : array_like
        Starting point; must give a finite value and gradient.
    config : OptimizerConfig, optional

    Returns
    -------
    OptimizeResult
        ``converged`` is False when the iteration budget ran out or the
        line search could not make progress; ``x`` is then the best iterate.
    """
    cfg = config or OptimizerConfig()
    x = np.array(x0, dtype=float)
    f, g = fun(x)
    f = float(f)
    g = np.asarray(g, dtype=float)
    if not np.isfinite(f) or not np.all(np.isfinite(g)):
        raise FloatingPointError("objective is not finite at the starting point")

    s_hist: list[np.ndarray] = []
    y_hist: list[np.ndarray] = []
    for it in range(cfg.max_iterations + 1):
        if np.max(np.abs(g), initial=0.0) <= cfg.gradient_tolerance:
            return OptimizeResult(x, f, g, it, True, "gradient below tolerance")
        if it == cfg.max_iterations:
            break

        # two-loop recursion
        q = g.copy()
        alphas = []
        for s, y in zip(reversed(s_hist), reversed(y_hist)):
            rho = 1.0 / (y @ s)
            a = rho * (s @ q)
            q -= a * y
            alphas.append((rho, a))
        if s_hist:
            q *= (s_hist[-1] @ y_hist[-1]) / (y_hist[-1] @ y_hist[-1])
        else:
            q /= max(np.linalg.norm(g), 1.0)
        for (s, y), (rho, a) in zip(zip(s_hist, y_hist), reversed(alphas)):
            b = rho * (y @ q)
            q += (a - b) * s
        p = -q
        d0 = float(g @ p)
        if d0 >= 0:
            s_hist.clear()
            y_hist.clear()
            p = -g / max(np.linalg.norm(g), 1.0)
            d0 = float(g @ p)

        def phi(t, x=x, p=p):
            fx, gx = fun(x + t * p)
            gx = np.asarray(gx, dtype=float)
            return float(fx), float(gx @ p), gx

        try:
            found = _strong_wolfe(phi, f, d0, 1.0, cfg)
        except _NonFinite as exc:
            raise FloatingPointError(str(exc)) from None
        if found is None:
            if s_hist:
                s_hist.clear()
                y_hist.clear()
                continue
            return OptimizeResult(x, f, g, it, False, "line search failed")
        t, f_new, g_new = found
        if f_new > f:
            return OptimizeResult(x, f, g, it, False, "line search failed")
        s = t * p
        y = g_new - g
        x = x + s
        converged_f = abs(f - f_new) <= 1e-15 * max(abs(f), 1.0) and np.all(s == 0)
        f, g = float(f_new), g_new
        if y @ s > 1e-12 * (y @ y):
            s_hist.append(s)
            y_hist.append(y)
            if len(s_hist) > cfg.memory_pairs:
                s_hist.pop(0)
                y_hist.pop(0)
        if converged_f:
            return OptimizeResult(x, f, g, it + 1, False, "no progress")
    logger.debug("lbfgs stopped at iteration cap (grad max %.3g)", np.max(np.abs(g)))
    return OptimizeResult(x, f, g, cfg.max_iterations, False, "iteration cap reached")
