"""Input validation helpers shared by estimators and operations."""

from __future__ import annotations

import numpy as np
from sklearn.utils import check_array


def check_alpha(alpha, name="alpha"):
    alpha = float(alpha)
    if not 0.0 <= alpha < 1.0:
        raise ValueError(f"{name} must lie in [0, 1), got {alpha}")
    return alpha


def check_signal_profiles(y, model, atol=1e-12):
    """Coerce ``y`` to a (count, N) float array of signals inside the model's interval."""
    y = check_array(np.atleast_2d(np.asarray(y, dtype=float)), dtype=float)
    if y.shape[1] != model.n_buyers:
        raise ValueError(f"signal profiles need {model.n_buyers} columns, got {y.shape[1]}")
    lo, hi = model.signal_interval
    if np.any(y < lo - atol) or np.any(y > hi + atol):
        raise ValueError(f"signals must lie in [{lo}, {hi}]")
    return y


def check_order_stats(z, model, atol=1e-12):
    """Coerce ``z`` to a (count, N-1) array sorted in descending order."""
    z = check_array(np.atleast_2d(np.asarray(z, dtype=float)), dtype=float)
    if z.shape[1] != model.n_buyers - 1:
        raise ValueError(f"order statistics need {model.n_buyers - 1} entries, got {z.shape[1]}")
    if np.any(np.diff(z, axis=1) > atol):
        raise ValueError("order statistics must be sorted in descending order")
    return z


def check_positive_int(value, name, minimum=1):
    value = int(value)
    if value < minimum:
        raise ValueError(f"{name} must be >= {minimum}, got {value}")
    return value
