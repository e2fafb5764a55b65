"""Box-constrained limited-memory quasi-Newton minimization.

Projected L-BFGS: the two-loop recursion acts on the variables that are not
held at a bound, trial points are projected back onto the box, and step
lengths are chosen by Armijo backtracking along the projected path. Every
objective call goes through an optional observer, which may stop the search.
"""

from __future__ import annotations

import enum
from collections import deque
from collections.abc import Callable
from dataclasses import dataclass

import numpy as np

from .core import BudgetExhausted

Observer = Callable[[np.ndarray, float, int], bool]


class Termination(str, enum.Enum):
    CONVERGED = "converged"
    BUDGET = "budget"
    OBSERVER_STOP = "observer-stop"
    STAGNATED = "stagnated"
    MAX_ITERATIONS = "max-iterations"


@dataclass
class MinimizeResult:
    """Outcome of :func:`minimize`.

    ``x_best``/``f_best`` is the lowest value seen over all evaluations,
    finite-difference probes included, so ``f_best <= f(x0)`` always holds.
    ``stop_point`` is the ``(x, f)`` pair that made the observer stop.
    """

    x_best: np.ndarray
    f_best: float
    iterations: int
    evaluations_used: int
    termination_reason: Termination
    stop_point: tuple[np.ndarray, float] | None = None


class _ObserverStop(Exception):
    pass


class _Tracker:
    """Wraps the objective: counts calls, keeps the best point, runs the observer."""

    def __init__(self, objective, observer):
        self.objective = objective
        self.observer = observer
        self.calls = 0
        self.x_best = None
        self.f_best = np.inf
        self.stop_point = None

    def seed(self, x, f):
        self.x_best = x.copy()
        self.f_best = f

    def __call__(self, x: np.ndarray) -> float:
        f = float(self.objective(x))
        self.calls += 1
        if not np.isfinite(f):
            raise FloatingPointError(f"objective returned {f} at a feasible point")
        if f < self.f_best:
            self.f_best = f
            self.x_best = x.copy()
        if self.observer is not None and self.observer(x, f, self.calls):
            self.stop_point = (x.copy(), f)
            raise _ObserverStop
        return f


def numeric_gradient(objective: Callable[[np.ndarray], float], x, bounds, f0: float | None = None):
    """Forward-difference gradient that never leaves the box.

    The step for coordinate ``i`` is ``sqrt(eps) * max(1, |x_i|)``; a
    coordinate whose forward probe would cross the upper bound is differenced
    backwards instead. Costs ``n`` objective calls, plus one when ``f0`` is
    not supplied.
    """
    lower, upper = (np.asarray(b, dtype=float) for b in bounds)
    x = np.asarray(x, dtype=float)
    if f0 is None:
        f0 = float(objective(x))
    h = np.sqrt(np.finfo(float).eps) * np.maximum(1.0, np.abs(x))
    grad = np.empty_like(x)
    probe = x.copy()
    for i in range(x.shape[0]):
        step = h[i]
        if x[i] + step > upper[i]:
            step = -step
        probe[i] = x[i] + step
        if probe[i] < lower[i]:
            probe[i] = lower[i]
        actual = probe[i] - x[i]
        grad[i] = (float(objective(probe)) - f0) / actual
        probe[i] = x[i]
    return grad


def _projected_gradient(x, g, lower, upper):
    pg = g.copy()
    pg[(x <= lower) & (g > 0)] = 0.0
    pg[(x >= upper) & (g < 0)] = 0.0
    return pg


def _steepest(g, free):
    d = -np.where(free, g, 0.0)
    return d / np.linalg.norm(d)


def _two_loop(g, memory, free):
    q = np.where(free, g, 0.0)
    alphas = []
    for s, y, rho in reversed(memory):
        a = rho * np.dot(s[free], q[free])
        q[free] -= a * y[free]
        alphas.append(a)
    s, y, _ = memory[-1]
    yy = np.dot(y[free], y[free])
    gamma = np.dot(s[free], y[free]) / yy if yy > 0 else 1.0
    if gamma <= 0 or not np.isfinite(gamma):
        gamma = 1.0
    r = gamma * q
    for (s, y, rho), a in zip(memory, reversed(alphas)):
        b = rho * np.dot(y[free], r[free])
        r[free] += (a - b) * s[free]
    r[~free] = 0.0
    return -r


def _first_step(f, g, free):
    # Polyak-type length |f| / |g| with zero as the target value
    norm = np.linalg.norm(g[free])
    if f == 0.0 or not norm > 0:
        return 1.0
    return min(1.0, abs(f) / norm)


def _interpolated_contraction(slope, change, contraction):
    """Step shrink factor from the quadratic through f(0), f'(0) and the
    rejected trial, kept within ``[0.1, contraction]``."""
    curvature = change - slope
    if curvature <= 0:
        return contraction
    return min(max(-0.5 * slope / curvature, 0.1), contraction)


def minimize(
    objective: Callable[[np.ndarray], float],
    x0,
    bounds,
    *,
    gradient: Callable[[np.ndarray], np.ndarray] | None = None,
    f0: float | None = None,
    observer: Observer | None = None,
    max_iterations: int = 200,
    gradient_tolerance: float = 1e-8,
    relative_improvement_tolerance: float = 1e-10,
    history: int = 10,
    sufficient_decrease: float = 1e-4,
    contraction: float = 0.5,
    max_backtracks: int = 40,
) -> MinimizeResult:
    """Minimize ``objective`` over the box ``bounds = (lower, upper)`` from ``x0``.

    With ``gradient=None`` the gradient is taken by :func:`numeric_gradient`
    through the same counted, observed objective. An analytic ``gradient`` is
    called only at accepted iterates and is not counted. ``f0``, when given,
    is trusted as ``objective(x0)`` and saves one call.

    Stops on a projected-gradient infinity norm below ``gradient_tolerance``,
    a relative improvement below ``relative_improvement_tolerance``, the
    iteration cap, a failed line search, an observer request, or
    :class:`~h2ma.core.BudgetExhausted` raised by the objective. None of these
    raise; the reason is reported in the result.
    """
    lower, upper = (np.asarray(b, dtype=float) for b in bounds)
    x = np.array(x0, dtype=float)
    if x.shape != lower.shape:
        raise ValueError("x0 and bounds differ in length")
    if np.any(x < lower) or np.any(x > upper):
        raise ValueError("x0 lies outside the box bounds")
    if gradient_tolerance <= 0 or relative_improvement_tolerance <= 0:
        raise ValueError("tolerances must be positive")

    fun = _Tracker(objective, observer)
    memory: deque = deque(maxlen=history)
    iterations = 0
    last_step = None

    def grad_at(xk, fk):
        if gradient is not None:
            return np.asarray(gradient(xk), dtype=float)
        return numeric_gradient(fun, xk, (lower, upper), f0=fk)

    def result(reason):
        return MinimizeResult(fun.x_best.copy(), fun.f_best, iterations, fun.calls, reason,
                              fun.stop_point)

    try:
        if f0 is None:
            f = fun(x)
        else:
            f = float(f0)
            fun.seed(x, f)
        if fun.x_best is None:
            fun.seed(x, f)
        g = grad_at(x, f)
        reason = Termination.MAX_ITERATIONS
        while iterations < max_iterations:
            pg = _projected_gradient(x, g, lower, upper)
            if np.max(np.abs(pg)) < gradient_tolerance:
                reason = Termination.CONVERGED
                break
            free = pg != 0.0
            if memory:
                d = _two_loop(g, list(memory), free)
                if np.dot(g, d) >= 0:
                    memory.clear()
            if not memory:
                d = _steepest(g, free)
            quasi_newton = bool(memory)

            accepted = False
            for attempt in range(2):
                # unit steps suit the quasi-Newton scaling; a restarted
                # steepest descent starts near the last accepted step length
                if quasi_newton:
                    alpha = 1.0
                elif last_step is None:
                    alpha = _first_step(f, g, free)
                else:
                    alpha = min(1.0, 10.0 * last_step)
                for _ in range(max_backtracks):
                    trial = np.clip(x + alpha * d, lower, upper)
                    step = trial - x
                    slope = np.dot(g, step)
                    if not np.any(step):
                        break
                    if slope >= 0:
                        alpha *= contraction
                        continue
                    f_trial = fun(trial)
                    if f_trial <= f + sufficient_decrease * slope:
                        accepted = True
                        break
                    alpha *= _interpolated_contraction(slope, f_trial - f, contraction)
                if accepted or not memory:
                    break
                # quasi-Newton direction failed; retry once along steepest descent
                memory.clear()
                quasi_newton = False
                d = _steepest(g, free)
            if not accepted:
                reason = Termination.STAGNATED
                break

            iterations += 1
            g_trial = grad_at(trial, f_trial)
            s = trial - x
            yv = g_trial - g
            sy = np.dot(s, yv)
            if sy > 1e-12 * np.dot(yv, yv):
                memory.append((s, yv, 1.0 / sy))
            improvement = (f - f_trial) / max(abs(f), abs(f_trial), 1.0)
            last_step = float(np.linalg.norm(s))
            x, f, g = trial, f_trial, g_trial
            if improvement < relative_improvement_tolerance:
                if not quasi_newton:
                    reason = Termination.CONVERGED
                    break
                # a badly scaled quasi-Newton model can stall far from the
                # optimum; confirm with one steepest-descent step first
                memory.clear()
        return result(reason)
    except BudgetExhausted:
        return result(Termination.BUDGET)
    except _ObserverStop:
        return result(Termination.OBSERVER_STOP)
