"""Player-level train/test split, k-fold indices, RFE and grid search."""
from __future__ import annotations

import csv
import itertools
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .metrics import r_squared
from .models import fit_model, fit_ridge
from .numerics import seeded_stream

logger = logging.getLogger(__name__)

RFE_LAMBDA = 2.0


@dataclass(frozen=True)
class SplitSpec:
    train_fraction: float = 0.8
    seed: int = 0

    def __post_init__(self):
        if not 0 < self.train_fraction < 1:
            raise ValueError("train_fraction must lie strictly between 0 and 1")


def split_players(player_ids, spec: SplitSpec = SplitSpec()):
    """Shuffle players with the ``split`` stream; the first floor(f*n) train."""
    ids = sorted(set(player_ids))
    if len(ids) < 5:
        raise ValueError("cohort too small to split")
    order = seeded_stream(spec.seed, "split").permutation(len(ids))
    n_train = math.floor(spec.train_fraction * len(ids))
    shuffled = [ids[i] for i in order]
    return sorted(shuffled[:n_train]), sorted(shuffled[n_train:])


def kfold_indices(n, k=3, seed=0):
    """``k`` (train, validation) index pairs; fold sizes differ by at most one."""
    if n < k:
        raise ValueError(f"need at least k={k} rows, got {n}")
    if k < 2:
        raise ValueError("k must be at least 2")
    order = seeded_stream(seed, "folds").permutation(n)
    folds = np.array_split(order, k)
    return [(np.sort(np.concatenate(folds[:i] + folds[i + 1:])), np.sort(folds[i]))
            for i in range(k)]


def cv_score(kind, params, X, y, k=3, seed=0):
    """Mean validation R^2 over ``k`` folds of the training rows."""
    scores = []
    for train, valid in kfold_indices(len(y), k, seed):
        model = fit_model(kind, X[train], y[train], params, seed=seed)
        scores.append(r_squared(y[valid], model.predict(X[valid])))
    return float(np.mean(scores))


@dataclass
class EliminationTrace:
    feature_names: list[str]
    elimination_order: list[str]
    scores: list[float]           # CV R^2 after each elimination
    initial_score: float          # CV R^2 with every feature
    retained: list[str]

    def curve(self):
        """(retained count, score) pairs, starting from the full feature set."""
        n = len(self.feature_names)
        return [(n, self.initial_score)] + [(n - i - 1, s) for i, s in enumerate(self.scores)]

    def score_at(self, n_retained):
        return dict(self.curve())[n_retained]

    def to_csv(self, path):
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["step", "removed", "retained_count", "cv_r2"])
            n = len(self.feature_names)
            for step, (name, score) in enumerate(zip(self.elimination_order, self.scores), 1):
                writer.writerow([step, name, n - step, format(score, ".10g")])


def rfe_rank(X, y, feature_names, target_count=20, k=3, seed=0, score=True):
    """Drop the feature with the smallest |ridge coefficient| one at a time.

    The ridge penalty is fixed at 2.  Coefficient ties go to the feature whose
    name sorts first.  When ``score`` is set, each surviving set is scored by
    k-fold CV R^2 of the same ridge model on the training rows.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    names = list(feature_names)
    if target_count < 1:
        raise ValueError("target_count must be at least 1")

    def evaluate(cols):
        if not score:
            return float("nan")
        return cv_score("ridge", {"alpha": RFE_LAMBDA}, X[:, cols], y, k, seed)

    alive = list(range(len(names)))
    initial = evaluate(alive)
    order, scores = [], []
    while len(alive) > target_count:
        coef = np.abs(fit_ridge(X[:, alive], y, RFE_LAMBDA).coef)
        smallest = coef.min()
        tied = [alive[i] for i in np.flatnonzero(coef == smallest)]
        drop = min(tied, key=lambda j: names[j])
        alive.remove(drop)
        order.append(names[drop])
        scores.append(evaluate(alive))
    return EliminationTrace(names, order, scores, initial, [names[j] for j in alive])


def grid_points(grid):
    """Cartesian product in key order, last key varying fastest."""
    keys = list(grid)
    return [dict(zip(keys, combo)) for combo in itertools.product(*(grid[k] for k in keys))]


@dataclass
class TuneResult:
    kind: str
    best_params: dict
    best_score: float
    scores: list[tuple[dict, float]] = field(default_factory=list)
    n_folds: int = 3

    def to_csv(self, path):
        keys = list(self.scores[0][0]) if self.scores else []
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow([*keys, "mean_cv_r2"])
            for params, s in self.scores:
                writer.writerow([*(params[k] for k in keys), format(s, ".10g")])


def grid_search(kind, grid, X_train, y_train, k=3, seed=0):
    """Mean k-fold R^2 for every grid point; the first maximum wins.

    A grid point whose fit or scoring fails scores -inf and the search moves on.
    A single-point grid has nothing to choose, so it is returned unscored (NaN).
    Only training rows are ever passed in.
    """
    points = grid_points(grid)
    if not points:
        raise ValueError("empty grid")
    if len(points) == 1:
        return TuneResult(kind, points[0], float("nan"), [(points[0], float("nan"))], k)
    X_train = np.asarray(X_train, dtype=float)
    y_train = np.asarray(y_train, dtype=float)
    scores = []
    for params in points:
        try:
            s = cv_score(kind, params, X_train, y_train, k, seed)
        except Exception as exc:  # noqa: BLE001 - any failure disqualifies the point only
            logger.warning("%s grid point %s failed: %s", kind, params, exc)
            s = float("-inf")
        if not np.isfinite(s):
            s = float("-inf")
        scores.append((params, s))
    best = max(range(len(scores)), key=lambda i: (scores[i][1], -i))
    return TuneResult(kind, scores[best][0], scores[best][1], scores, k)


def log_grid(lo, hi, n):
    """``n`` log-spaced values with both endpoints exact."""
    values = [float(f"{v:.12g}") for v in np.geomspace(lo, hi, n)]
    values[0], values[-1] = float(lo), float(hi)
    return [min(max(v, lo), hi) for v in values]


# Parameter ranges per model; continuous ones are log-spaced, integers enumerated.
DEFAULT_GRIDS = {
    "ridge": {"alpha": log_grid(0.01, 100, 5)},
    "mlp": {"alpha": log_grid(0.01, 100, 5), "layer1": list(range(4, 17)),
            "layer2": list(range(0, 6))},
    "forest": {"max_depth": list(range(2, 8)), "min_split": list(range(1, 5))},
    "svr": {"epsilon": log_grid(1e-4, 1e2, 5), "C": log_grid(1e-2, 1e6, 5),
            "gamma": log_grid(1e-5, 1e2, 5)},
}
