"""Real-coded variation operators for the stochastic explorer."""

from __future__ import annotations

import numpy as np


def sbx_crossover(p1, p2, lower, upper, rng: np.random.Generator, eta: float = 10.0,
                  probability: float = 0.9):
    """Bounded simulated binary crossover; returns two children inside the box."""
    c1 = np.array(p1, dtype=float)
    c2 = np.array(p2, dtype=float)
    if rng.random() > probability:
        return c1, c2
    n = c1.shape[0]
    swap = rng.random(n) <= 0.5
    for i in range(n):
        if not swap[i]:
            continue
        a, b = c1[i], c2[i]
        if abs(a - b) <= 1e-14:
            continue
        y1, y2 = min(a, b), max(a, b)
        lo, hi = lower[i], upper[i]
        u = rng.random()

        def spread(beta):
            alpha = 2.0 - beta ** -(eta + 1.0)
            if u <= 1.0 / alpha:
                return (u * alpha) ** (1.0 / (eta + 1.0))
            return (1.0 / (2.0 - u * alpha)) ** (1.0 / (eta + 1.0))

        bq = spread(1.0 + 2.0 * (y1 - lo) / (y2 - y1))
        child_lo = 0.5 * ((y1 + y2) - bq * (y2 - y1))
        bq = spread(1.0 + 2.0 * (hi - y2) / (y2 - y1))
        child_hi = 0.5 * ((y1 + y2) + bq * (y2 - y1))
        child_lo = min(max(child_lo, lo), hi)
        child_hi = min(max(child_hi, lo), hi)
        if rng.random() <= 0.5:
            c1[i], c2[i] = child_hi, child_lo
        else:
            c1[i], c2[i] = child_lo, child_hi
    return c1, c2


def polynomial_mutation(x, lower, upper, rng: np.random.Generator, eta: float = 20.0,
                        rate: float | None = None):
    """Bounded polynomial mutation, each coordinate mutated with ``rate``
    (default ``1/n``)."""
    x = np.array(x, dtype=float)
    n = x.shape[0]
    rate = 1.0 / n if rate is None else rate
    mutate = rng.random(n) < rate
    for i in np.flatnonzero(mutate):
        lo, hi = lower[i], upper[i]
        width = hi - lo
        d1 = (x[i] - lo) / width
        d2 = (hi - x[i]) / width
        u = rng.random()
        power = 1.0 / (eta + 1.0)
        if u < 0.5:
            val = 2.0 * u + (1.0 - 2.0 * u) * (1.0 - d1) ** (eta + 1.0)
            dq = val**power - 1.0
        else:
            val = 2.0 * (1.0 - u) + 2.0 * (u - 0.5) * (1.0 - d2) ** (eta + 1.0)
            dq = 1.0 - val**power
        x[i] = min(max(x[i] + dq * width, lo), hi)
    return x


def dominated_by_counts(Y: np.ndarray) -> np.ndarray:
    """For each row, the number of rows that strictly dominate it."""
    Y = np.asarray(Y, dtype=float)
    return np.sum(np.all(Y[None, :, :] < Y[:, None, :], axis=2), axis=1)
