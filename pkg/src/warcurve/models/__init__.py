from .base import FeatureMismatchError, FittedModel, model_from_text, predict
from .forest import BaggingModel, ForestHyperparams, fit_bagging
from .mlp import MlpHyperparams, MlpModel, fit_mlp
from .ridge import RidgeHyperparams, RidgeModel, fit_ridge
from .svr import SvrHyperparams, SvrModel, fit_svr, rbf_kernel

MODEL_KINDS = ("ridge", "mlp", "forest", "svr")


def fit_model(kind, X, y, params, seed=0, feature_names=None):
    """Fit one of the four regressors from a plain parameter dict."""
    if kind == "ridge":
        return fit_ridge(X, y, RidgeHyperparams(**_rename(params, alpha="lam")),
                         feature_names=feature_names)
    if kind == "mlp":
        return fit_mlp(X, y, MlpHyperparams(**params), seed=seed, feature_names=feature_names)
    if kind == "forest":
        return fit_bagging(X, y, ForestHyperparams(**params), seed=seed,
                           feature_names=feature_names)
    if kind == "svr":
        return fit_svr(X, y, SvrHyperparams(**params), seed=seed, feature_names=feature_names)
    raise ValueError(f"unknown model kind {kind!r}")


def _rename(params, **mapping):
    return {mapping.get(k, k): v for k, v in params.items()}


__all__ = [
    "BaggingModel", "FeatureMismatchError", "FittedModel", "ForestHyperparams",
    "MODEL_KINDS", "MlpHyperparams", "MlpModel", "RidgeHyperparams", "RidgeModel",
    "SvrHyperparams", "SvrModel", "fit_bagging", "fit_mlp", "fit_model", "fit_ridge",
    "fit_svr", "model_from_text", "predict", "rbf_kernel",
]
