"""Exact two-objective hypervolume, exclusive contributions and their gradient.

All comparisons are exact on stored doubles. Only points strictly dominating
the reference (nadir) point contribute.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._validation import check_objective_vector, check_points, check_positive_int


class UnsupportedDimensionError(ValueError):
    """Raised for objective counts other than two."""


class UndefinedGradientError(ValueError):
    """The contribution is not differentiable at the requested point."""


def _check_nadir(z) -> np.ndarray:
    z = check_objective_vector(z)
    if z.shape[0] != 2:
        raise UnsupportedDimensionError(f"only 2 objectives are supported, got {z.shape[0]}")
    return z


def _check_2d(points) -> np.ndarray:
    P = check_points(points)
    if P.shape[0] and P.shape[1] != 2:
        raise UnsupportedDimensionError(f"only 2 objectives are supported, got {P.shape[1]}")
    return P.reshape(-1, 2)


def _sweep(P: np.ndarray, z: np.ndarray) -> float:
    # P: (N, 2), already restricted to points strictly dominating z
    if P.shape[0] == 0:
        return 0.0
    order = np.lexsort((P[:, 1], P[:, 0]))
    p1 = P[order, 0]
    p2 = P[order, 1]
    running = np.minimum.accumulate(p2)
    previous = np.empty_like(running)
    previous[0] = z[1]
    previous[1:] = running[:-1]
    heights = np.maximum(previous - p2, 0.0)
    return float(np.sum((z[0] - p1) * heights))


def hypervolume(points, z) -> float:
    """Area dominated by ``points`` and bounded by the nadir point ``z``.

    Points that do not strictly dominate ``z`` are ignored. Sort-and-sweep,
    O(N log N).
    """
    z = _check_nadir(z)
    P = _check_2d(points)
    P = P[np.all(P < z, axis=1)]
    return _sweep(P, z)


@dataclass(frozen=True)
class ContributionGeometry:
    """Caps bounding the exclusive rectangle of a point.

    ``left_cap`` is the second objective of the nearest neighbour to the left
    (or ``z[1]``); ``right_cap`` the first objective of the nearest neighbour
    below (or ``z[0]``).
    """

    left_cap: float
    right_cap: float


class ContributionLandscape:
    """Exclusive hypervolume contribution of one movable point against a fixed
    set, with the set pre-processed once.

    Used by exploitation, where the archive is constant while a single point
    moves.
    """

    def __init__(self, others, z):
        self.z = _check_nadir(z)
        P = _check_2d(others)
        self.others = P[np.all(P < self.z, axis=1)]
        self._base = _sweep(self.others, self.z)

    @property
    def base_hypervolume(self) -> float:
        return self._base

    def value(self, y) -> float:
        y = np.asarray(y, dtype=float)
        z = self.z
        if not (y[0] < z[0] and y[1] < z[1]):
            return 0.0
        # area of [y, z) not already covered by the fixed set
        clipped = np.maximum(self.others, y)
        box = (z[0] - y[0]) * (z[1] - y[1])
        covered = _sweep(clipped[np.all(clipped < z, axis=1)], z)
        return max(box - covered, 0.0)

    def geometry(self, y) -> ContributionGeometry:
        y = np.asarray(y, dtype=float)
        O = self.others
        left = O[O[:, 0] < y[0], 1]
        below = O[O[:, 1] < y[1], 0]
        left_cap = min(self.z[1], float(left.min())) if left.size else float(self.z[1])
        right_cap = min(self.z[0], float(below.min())) if below.size else float(self.z[0])
        return ContributionGeometry(left_cap, right_cap)

    def gradient(self, y) -> np.ndarray:
        """Partial derivatives of :meth:`value` with respect to ``y``.

        Raises :class:`UndefinedGradientError` when ``y`` does not strictly
        dominate the nadir point, is weakly dominated by the fixed set, or
        shares a coordinate value with one of its points.
        """
        y = np.asarray(y, dtype=float)
        z = self.z
        if not (y[0] < z[0] and y[1] < z[1]):
            raise UndefinedGradientError("point does not strictly dominate the nadir point")
        O = self.others
        if O.shape[0]:
            if np.any(np.all(O <= y, axis=1)):
                raise UndefinedGradientError("point is dominated by the fixed set")
            if np.any(O[:, 0] == y[0]) or np.any(O[:, 1] == y[1]):
                raise UndefinedGradientError("point ties a neighbour in one coordinate")
        geo = self.geometry(y)
        return np.array([-(geo.left_cap - y[1]), -(geo.right_cap - y[0])])

    def numeric_gradient(self, y, step: float = 1e-7) -> np.ndarray:
        """One-sided differences of :meth:`value`; fallback where
        :meth:`gradient` is undefined. Steps toward the ideal corner, which is
        the side the contribution grows on."""
        y = np.asarray(y, dtype=float)
        base = self.value(y)
        grad = np.empty(2)
        for i in range(2):
            h = step * max(1.0, abs(y[i]))
            yp = y.copy()
            yp[i] -= h
            grad[i] = (base - self.value(yp)) / (y[i] - yp[i])
        return grad


def contribution(y, others, z) -> float:
    """Hypervolume gained by adding ``y`` to ``others``: ``H(others + y) - H(others)``."""
    y = check_objective_vector(y)
    if y.shape[0] != 2:
        raise UnsupportedDimensionError(f"only 2 objectives are supported, got {y.shape[0]}")
    return ContributionLandscape(others, z).value(y)


def contribution_geometry(y, others, z) -> ContributionGeometry:
    return ContributionLandscape(others, z).geometry(check_objective_vector(y))


def contribution_gradient(y, others, z) -> np.ndarray:
    """Gradient of :func:`contribution` with respect to the coordinates of ``y``.

    Equals ``(-(left_cap - y2), -(right_cap - y1))``; both entries are <= 0.
    """
    y = check_objective_vector(y)
    if y.shape[0] != 2:
        raise UnsupportedDimensionError(f"only 2 objectives are supported, got {y.shape[0]}")
    return ContributionLandscape(others, z).gradient(y)


def mc_hypervolume_oracle(points, z, sample_count: int, seed: int = 0,
                          chunk: int = 200_000) -> tuple[float, float]:
    """Monte-Carlo estimate of the hypervolume and its standard error.

    Samples uniformly in the box spanned by the points' minimum corner and
    ``z``, and tests each sample against every point by brute force.
    """
    sample_count = check_positive_int(sample_count, "sample_count")
    z = _check_nadir(z)
    P = _check_2d(points)
    P = P[np.all(P < z, axis=1)]
    if P.shape[0] == 0:
        return 0.0, 0.0
    lo = P.min(axis=0)
    volume = float(np.prod(z - lo))
    rng = np.random.default_rng(seed)
    hits = 0
    remaining = sample_count
    while remaining:
        k = min(chunk, remaining)
        s = lo + (z - lo) * rng.random((k, 2))
        inside = np.zeros(k, dtype=bool)
        for p in P:
            inside |= (p[0] < s[:, 0]) & (p[1] < s[:, 1])
        hits += int(inside.sum())
        remaining -= k
    frac = hits / sample_count
    se = volume * np.sqrt(frac * (1.0 - frac) / sample_count)
    return volume * frac, float(se)
