"""Input validation helpers shared by the public entry points."""

from __future__ import annotations

import numbers

import numpy as np
from sklearn.utils import check_array


def check_objective_vector(values) -> np.ndarray:
    """Return ``values`` as a finite 1-D float array of length >= 2."""
    y = np.array(values, dtype=float).reshape(-1)
    if y.shape[0] < 2:
        raise ValueError(f"objective vectors need at least 2 entries, got {y.shape[0]}")
    if not np.all(np.isfinite(y)):
        raise ValueError(f"objective vector has non-finite entries: {y.tolist()}")
    return y


def check_points(points, n_objectives: int | None = None) -> np.ndarray:
    """Validate a set of objective vectors as an ``(N, M)`` float array.

    Empty input is allowed and returned with shape ``(0, M)``.
    """
    if points is None:
        points = []
    arr = np.asarray(points, dtype=float)
    if arr.size == 0:
        return np.empty((0, n_objectives or 2))
    if arr.ndim == 1:
        arr = arr.reshape(1, -1)
    arr = check_array(arr, dtype=np.float64, ensure_2d=True, ensure_all_finite=True, copy=False)
    if n_objectives is not None and arr.shape[1] != n_objectives:
        raise ValueError(f"expected {n_objectives} objective columns, got {arr.shape[1]}")
    return arr


def check_bounds(lower, upper) -> tuple[np.ndarray, np.ndarray]:
    lo = np.array(lower, dtype=float).reshape(-1)
    hi = np.array(upper, dtype=float).reshape(-1)
    if lo.shape != hi.shape:
        raise ValueError(f"bounds differ in length: {lo.shape} vs {hi.shape}")
    if lo.shape[0] == 0:
        raise ValueError("bounds must have at least one coordinate")
    if not (np.all(np.isfinite(lo)) and np.all(np.isfinite(hi))):
        raise ValueError("bounds must be finite")
    if np.any(lo >= hi):
        raise ValueError("every lower bound must be strictly below its upper bound")
    return lo, hi


def check_decision_vector(x, lower: np.ndarray, upper: np.ndarray) -> np.ndarray:
    """Return ``x`` as a float array, rejecting points outside the box."""
    x = np.array(x, dtype=float).reshape(-1)
    if x.shape != lower.shape:
        raise ValueError(f"decision vector has {x.shape[0]} entries, expected {lower.shape[0]}")
    if not np.all(np.isfinite(x)):
        raise ValueError("decision vector has non-finite entries")
    if np.any(x < lower) or np.any(x > upper):
        raise ValueError("decision vector lies outside the box bounds")
    return x


def check_positive_int(value, name: str, minimum: int = 1) -> int:
    if isinstance(value, bool) or not isinstance(value, numbers.Integral):
        raise TypeError(f"{name} must be an integer, got {type(value).__name__}")
    if value < minimum:
        raise ValueError(f"{name} must be >= {minimum}, got {value}")
    return int(value)


def check_positive_float(value, name: str) -> float:
    value = float(value)
    if not np.isfinite(value) or value <= 0:
        raise ValueError(f"{name} must be a positive finite number, got {value}")
    return value
