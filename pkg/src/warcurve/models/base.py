"""Shared regressor plumbing: feature-name checks and text serialization."""
from __future__ import annotations

import json

import numpy as np

FORMAT_VERSION = 1

_REGISTRY: dict[str, type] = {}


def register(kind):
    def wrap(cls):
        cls.kind = kind
        _REGISTRY[kind] = cls
        return cls
    return wrap


class FeatureMismatchError(ValueError):
    pass


class FittedModel:
    """Base for trained regressors.

    Subclasses store their learned arrays as attributes, implement
    ``_predict`` on a float matrix, and list serializable state in
    ``_params``.
    """

    kind = "abstract"
    _params: tuple[str, ...] = ()

    def __init__(self, feature_names=None, hyperparams=None, seed=None, converged=True):
        self.feature_names = list(feature_names) if feature_names is not None else None
        self.hyperparams = dict(hyperparams or {})
        self.seed = seed
        self.converged = converged

    def predict(self, X, feature_names=None):
        X = np.asarray(X, dtype=float)
        if X.ndim == 1:
            X = X[:, None]
        if feature_names is not None and self.feature_names is not None:
            if list(feature_names) != self.feature_names:
                raise FeatureMismatchError(
                    "feature names do not match the names the model was trained on")
        n_expected = self.n_features
        if X.shape[1] != n_expected:
            raise FeatureMismatchError(f"expected {n_expected} features, got {X.shape[1]}")
        return self._predict(X)

    def to_dict(self):
        state = {}
        for name in self._params:
            value = getattr(self, name)
            state[name] = value.tolist() if isinstance(value, np.ndarray) else value
        return {
            "format": "warcurve-model",
            "version": FORMAT_VERSION,
            "kind": self.kind,
            "hyperparams": self.hyperparams,
            "feature_names": self.feature_names,
            "seed": self.seed,
            "converged": self.converged,
            "params": state,
        }

    def to_text(self):
        return json.dumps(self.to_dict(), indent=1, sort_keys=True) + "\n"

    @classmethod
    def _from_state(cls, state):
        raise NotImplementedError


def predict(model: FittedModel, X, feature_names=None):
    """One prediction per row of ``X``; names are checked when given."""
    return model.predict(X, feature_names)


def model_from_text(text: str) -> FittedModel:
    data = json.loads(text)
    if data.get("format") != "warcurve-model":
        raise ValueError("not a serialized warcurve model")
    if data.get("version") != FORMAT_VERSION:
        raise ValueError(f"unsupported model format version {data.get('version')}")
    cls = _REGISTRY[data["kind"]]
    model = cls._from_state(data["params"])
    model.feature_names = data["feature_names"]
    model.hyperparams = data["hyperparams"]
    model.seed = data["seed"]
    model.converged = data["converged"]
    return model
