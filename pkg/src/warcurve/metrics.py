import numpy as np


class UndefinedRSquaredError(ValueError):
    pass


def r_squared(actual, predicted):
    """Coefficient of determination ``1 - SS_res / SS_tot``."""
    actual = np.asarray(actual, dtype=float)
    predicted = np.asarray(predicted, dtype=float)
    if actual.shape != predicted.shape or actual.size < 2:
        raise ValueError("need two equal-length vectors with at least 2 entries")
    ss_tot = np.sum((actual - actual.mean()) ** 2)
    if ss_tot == 0:
        raise UndefinedRSquaredError("R^2 is undefined when all actual values are identical")
    return float(1.0 - np.sum((actual - predicted) ** 2) / ss_tot)
