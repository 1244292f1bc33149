"""Bootstrap-aggregated regression trees.

Every split considers all features, so with bootstrap on this is plain
bagging rather than a feature-subsampled random forest.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..numerics import seeded_stream
from .base import FittedModel, register

LEAF = -1


@dataclass(frozen=True)
class ForestHyperparams:
    n_trees: int = 100
    max_depth: int = 5
    min_split: int = 2  # minimum samples a node needs before it may split
    bootstrap: bool = True

    def __post_init__(self):
        if self.n_trees < 1 or self.max_depth < 1 or self.min_split < 1:
            raise ValueError("n_trees, max_depth and min_split must all be >= 1")


@dataclass
class Tree:
    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray

    def predict(self, X):
        node = np.zeros(X.shape[0], dtype=np.int64)
        active = self.feature[node] != LEAF
        while active.any():
            rows = np.flatnonzero(active)
            cur = node[rows]
            go_left = X[rows, self.feature[cur]] <= self.threshold[cur]
            node[rows] = np.where(go_left, self.left[cur], self.right[cur])
            active[rows] = self.feature[node[rows]] != LEAF
        return self.value[node]

    def to_dict(self):
        return {k: getattr(self, k).tolist()
                for k in ("feature", "threshold", "left", "right", "value")}

    @classmethod
    def from_dict(cls, d):
        return cls(np.asarray(d["feature"], dtype=np.int64),
                   np.asarray(d["threshold"], dtype=float),
                   np.asarray(d["left"], dtype=np.int64),
                   np.asarray(d["right"], dtype=np.int64),
                   np.asarray(d["value"], dtype=float))


def best_split(X, y):
    """Best (feature, threshold, sse) over midpoints of sorted distinct values.

    Returns None when no feature has two distinct values.  Exact ties in
    squared error go to the lowest feature index, then the lowest threshold.
    """
    n, d = X.shape
    if n < 2:
        return None
    order = np.argsort(X, axis=0, kind="stable")
    xs = np.take_along_axis(X, order, axis=0)
    ys = y[order]
    csum = np.cumsum(ys, axis=0)[:-1]
    csq = np.cumsum(ys * ys, axis=0)[:-1]
    total, total_sq = csum[-1] + ys[-1], csq[-1] + ys[-1] ** 2
    n_left = np.arange(1, n, dtype=float)[:, None]
    n_right = n - n_left
    sse = (csq - csum ** 2 / n_left) + ((total_sq - csq) - (total - csum) ** 2 / n_right)
    valid = xs[1:] > xs[:-1]
    if not valid.any():
        return None
    sse = np.where(valid, sse, np.inf)
    flat = int(np.argmin(sse.T.ravel()))
    feat, k = divmod(flat, n - 1)
    threshold = 0.5 * (xs[k, feat] + xs[k + 1, feat])
    return feat, float(threshold), float(sse[k, feat])


def build_tree(X, y, max_depth, min_split):
    feature, threshold, left, right, value = [], [], [], [], []

    def grow(idx, depth):
        node = len(feature)
        yn = y[idx]
        feature.append(LEAF)
        threshold.append(0.0)
        left.append(LEAF)
        right.append(LEAF)
        value.append(float(yn.mean()))
        node_sse = float(np.sum((yn - yn.mean()) ** 2))
        if depth >= max_depth or len(idx) < max(min_split, 2) or node_sse <= 1e-14:
            return node
        split = best_split(X[idx], yn)
        if split is None:
            return node
        feat, thr, _ = split
        mask = X[idx, feat] <= thr
        feature[node] = feat
        threshold[node] = thr
        left[node] = grow(idx[mask], depth + 1)
        right[node] = grow(idx[~mask], depth + 1)
        return node

    grow(np.arange(len(y)), 0)
    return Tree(np.asarray(feature, dtype=np.int64), np.asarray(threshold),
                np.asarray(left, dtype=np.int64), np.asarray(right, dtype=np.int64),
                np.asarray(value))


@register("forest")
class BaggingModel(FittedModel):
    _params = ("n_inputs", "trees")

    def __init__(self, n_inputs, trees, **kw):
        super().__init__(**kw)
        self.n_inputs = int(n_inputs)
        self.trees = list(trees)

    @property
    def n_features(self):
        return self.n_inputs

    def tree_predictions(self, X):
        X = np.asarray(X, dtype=float)
        return np.vstack([t.predict(X) for t in self.trees])

    def _predict(self, X):
        return self.tree_predictions(X).mean(axis=0)

    def to_dict(self):
        d = super().to_dict()
        d["params"]["trees"] = [t.to_dict() for t in self.trees]
        return d

    @classmethod
    def _from_state(cls, state):
        return cls(state["n_inputs"], [Tree.from_dict(t) for t in state["trees"]])


def fit_bagging(X, y, hyper: ForestHyperparams = ForestHyperparams(), seed=0,
                feature_names=None):
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    if X.shape[0] != y.shape[0] or y.shape[0] < 1:
        raise ValueError("X and y need the same, non-zero number of rows")
    n = len(y)
    trees = []
    for t in range(hyper.n_trees):
        if hyper.bootstrap:
            rows = seeded_stream(seed, f"bootstrap/{t}").integers(0, n, size=n)
        else:
            rows = np.arange(n)
        trees.append(build_tree(X[rows], y[rows], hyper.max_depth, hyper.min_split))
    return BaggingModel(X.shape[1], trees, feature_names=feature_names,
                        hyperparams={"n_trees": hyper.n_trees, "max_depth": hyper.max_depth,
                                     "min_split": hyper.min_split, "bootstrap": hyper.bootstrap},
                        seed=seed)
