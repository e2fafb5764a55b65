"""ZDT1-ZDT4 and ZDT6 bi-objective benchmarks.

Every problem has the form ``f2 = g(x) * h(f1, g)`` and its Pareto front is
the shell ``g = 1``. Nadir points are the upper objective bounds plus one.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import integrate, optimize

from ._validation import check_positive_int
from .core import Candidate, Evaluation, EvaluationCounter, Problem

ZdtEvaluation = Evaluation

PROBLEM_NAMES = ("zdt1", "zdt2", "zdt3", "zdt4", "zdt6")

# derivative singularities (sqrt at f1 = 0, fourth root at g-sum = 0) are
# evaluated this far inside the box, the scale of a forward-difference probe
_EPS = np.sqrt(np.finfo(float).eps)


def _linear_g(x: np.ndarray) -> float:
    return 1.0 + 9.0 * np.sum(x[1:]) / (x.shape[0] - 1)


def _zdt1(x):
    f1 = x[0]
    g = _linear_g(x)
    return Evaluation(np.array([f1, g * (1.0 - np.sqrt(f1 / g))]), float(g))


def _zdt2(x):
    f1 = x[0]
    g = _linear_g(x)
    return Evaluation(np.array([f1, g * (1.0 - (f1 / g) ** 2)]), float(g))


def _zdt3(x):
    f1 = x[0]
    g = _linear_g(x)
    h = 1.0 - np.sqrt(f1 / g) - np.sin(10.0 * np.pi * f1) * f1 / g
    return Evaluation(np.array([f1, g * h]), float(g))


def _zdt4_g(x):
    rest = x[1:]
    return 1.0 + 10.0 * (x.shape[0] - 1) + np.sum(rest**2 - 10.0 * np.cos(4.0 * np.pi * rest))


def _zdt4(x):
    f1 = x[0]
    g = _zdt4_g(x)
    return Evaluation(np.array([f1, g * (1.0 - np.sqrt(f1 / g))]), float(g))


def _zdt6_f1(x1):
    return 1.0 - np.exp(-4.0 * x1) * np.sin(6.0 * np.pi * x1) ** 6


def _zdt6(x):
    f1 = _zdt6_f1(x[0])
    g = 1.0 + 9.0 * (np.sum(x[1:]) / (x.shape[0] - 1)) ** 0.25
    return Evaluation(np.array([f1, g * (1.0 - (f1 / g) ** 2)]), float(g))


def _sqrt_front_jacobian(x, g, dg):
    # f2 = g - sqrt(f1 * g) with f1 = x1
    x1 = max(x[0], _EPS)
    J = np.zeros((2, x.shape[0]))
    J[0, 0] = 1.0
    J[1, 0] = -0.5 * np.sqrt(g / x1)
    J[1, 1:] = (1.0 - 0.5 * np.sqrt(x1 / g)) * dg
    return J


def _zdt1_jac(x):
    n = x.shape[0]
    return _sqrt_front_jacobian(x, _linear_g(x), np.full(n - 1, 9.0 / (n - 1)))


def _zdt2_jac(x):
    n = x.shape[0]
    g = _linear_g(x)
    J = np.zeros((2, n))
    J[0, 0] = 1.0
    J[1, 0] = -2.0 * x[0] / g
    J[1, 1:] = (1.0 + (x[0] / g) ** 2) * 9.0 / (n - 1)
    return J


def _zdt3_jac(x):
    n = x.shape[0]
    J = _sqrt_front_jacobian(x, _linear_g(x), np.full(n - 1, 9.0 / (n - 1)))
    w = 10.0 * np.pi
    J[1, 0] -= np.sin(w * x[0]) + w * x[0] * np.cos(w * x[0])
    return J


def _zdt4_jac(x):
    rest = x[1:]
    dg = 2.0 * rest + 40.0 * np.pi * np.sin(4.0 * np.pi * rest)
    return _sqrt_front_jacobian(x, _zdt4_g(x), dg)


def _zdt6_jac(x):
    n = x.shape[0]
    x1 = x[0]
    s = max(np.sum(x[1:]) / (n - 1), _EPS)
    g = 1.0 + 9.0 * s**0.25
    f1 = _zdt6_f1(x1)
    w = 6.0 * np.pi
    sn = np.sin(w * x1)
    df1 = np.exp(-4.0 * x1) * sn**5 * (4.0 * sn - 6.0 * w * np.cos(w * x1))
    J = np.zeros((2, n))
    J[0, 0] = df1
    J[1, 0] = -2.0 * f1 * df1 / g
    J[1, 1:] = (1.0 + (f1 / g) ** 2) * 2.25 * s**-0.75 / (n - 1)
    return J


_FUNCTIONS = {
    "zdt1": (_zdt1, _zdt1_jac),
    "zdt2": (_zdt2, _zdt2_jac),
    "zdt3": (_zdt3, _zdt3_jac),
    "zdt4": (_zdt4, _zdt4_jac),
    "zdt6": (_zdt6, _zdt6_jac),
}


@dataclass(frozen=True, eq=False)
class ZdtProblem(Problem):
    """A ZDT instance. Use :func:`make_problem` to build one."""

    def p_distance(self, candidates: Sequence[Candidate]) -> float:
        return p_distance(self, candidates)

    def max_front_hypervolume(self) -> float:
        return max_front_hypervolume(self)


def make_problem(name: str, n: int = 30) -> ZdtProblem:
    """Build ``zdt1``..``zdt4`` or ``zdt6`` with ``n`` decision variables,
    with the usual decision spaces and fixed nadir points."""
    key = name.lower()
    if key not in _FUNCTIONS:
        raise ValueError(f"unknown problem {name!r}; choose from {', '.join(PROBLEM_NAMES)}")
    n = check_positive_int(n, "n", minimum=2)
    lower = np.zeros(n)
    upper = np.ones(n)
    nadir = np.array([2.0, 11.0])
    if key == "zdt4":
        lower[1:] = -5.0
        upper[1:] = 5.0
        nadir = np.array([2.0, 2.0 + 50.0 * (n - 1)])
    fun, jac = _FUNCTIONS[key]
    return ZdtProblem(name=key, lower=lower, upper=upper, nadir=nadir, fun=fun, jacobian=jac)


def evaluate(problem: Problem, x, counter: EvaluationCounter | None = None) -> Evaluation:
    """Evaluate ``problem`` at ``x``; ticks ``counter`` once if given."""
    return problem.evaluate(x, counter)


def analytic_jacobian(problem: Problem, x) -> np.ndarray:
    """``(2, n)`` matrix of exact partials. Not counted as an evaluation."""
    if problem.jacobian is None:
        raise ValueError(f"{problem.name} has no analytic Jacobian")
    x = np.asarray(x, dtype=float)
    if np.any(x < problem.lower) or np.any(x > problem.upper):
        raise ValueError("decision vector lies outside the box bounds")
    return problem.jacobian(x)


def p_distance(problem: Problem, candidates: Sequence[Candidate]) -> float:
    """Mean of ``max(g - 1, 0)`` over ``candidates``; zero on the front."""
    candidates = list(candidates)
    if not candidates:
        raise ValueError("p_distance needs at least one candidate")
    gs = []
    for c in candidates:
        g = c.g if c.g is not None else problem.evaluate(c.x).g
        gs.append(max(g - 1.0, 0.0))
    return float(np.mean(gs))


def _zdt3_h(t):
    return 1.0 - np.sqrt(t) - t * np.sin(10.0 * np.pi * t)


def _zdt3_envelope_segments(grid: int = 200_001, tol: float = 1e-12):
    """Sub-intervals of f1 in [0, 1] whose front points are non-dominated.

    A point is non-dominated iff ``h`` there is below ``h`` everywhere to its
    left. Segments end at local minima of ``h`` and restart where ``h`` drops
    back below the running minimum.
    """
    t = np.linspace(0.0, 1.0, grid)
    h = _zdt3_h(t)
    prev_min = np.concatenate(([np.inf], np.minimum.accumulate(h)[:-1]))
    on = h < prev_min
    segments = []
    i = 0
    while i < grid:
        if not on[i]:
            i += 1
            continue
        j = i
        while j + 1 < grid and on[j + 1]:
            j += 1
        segments.append((i, j))
        i = j + 1

    def dh(s):
        w = 10.0 * np.pi
        return -0.5 / np.sqrt(s) - np.sin(w * s) - w * s * np.cos(w * s)

    refined = []
    running_min = np.inf
    for i, j in segments:
        if i == 0:
            a = 0.0
        else:
            # h(a) equals the running minimum to the left
            a = optimize.brentq(lambda s: _zdt3_h(s) - running_min, t[i - 1], t[i], xtol=tol)
        if j == grid - 1:
            b = 1.0
        else:
            lo, hi = t[max(j - 1, 0)], t[min(j + 1, grid - 1)]
            b = optimize.brentq(dh, lo, hi, xtol=tol) if dh(lo) * dh(hi) < 0 else t[j]
        refined.append((a, b))
        running_min = _zdt3_h(b)
    return refined


@lru_cache(maxsize=None)
def _zdt6_min_f1() -> float:
    res = optimize.minimize_scalar(_zdt6_f1, bounds=(0.0, 1.0 / 6.0), method="bounded",
                                   options={"xatol": 1e-13})
    return float(res.fun)


def max_front_hypervolume(problem: Problem) -> float:
    """Hypervolume of the continuous Pareto front against the problem's nadir."""
    z1, z2 = problem.nadir
    name = problem.name
    if name == "zdt1" or name == "zdt4":
        # int_0^1 (z2 - 1 + sqrt(t)) dt + (z1 - 1) * z2
        return (z2 - 1.0 + 2.0 / 3.0) + (z1 - 1.0) * z2
    if name == "zdt2":
        return (z2 - 1.0 + 1.0 / 3.0) + (z1 - 1.0) * z2
    if name == "zdt3":
        total = 0.0
        last = 0.0
        running_min = z2
        for a, b in _zdt3_envelope_segments():
            # flat stretch between segments sits at the previous minimum
            total += (a - last) * (z2 - running_min)
            val, _ = integrate.quad(lambda s: z2 - _zdt3_h(s), a, b, epsabs=1e-12, epsrel=1e-12,
                                    limit=200)
            total += val
            running_min = _zdt3_h(b)
            last = b
        total += (1.0 - last) * (z2 - running_min)
        return total + (z1 - 1.0) * (z2 - running_min)
    if name == "zdt6":
        m = _zdt6_min_f1()
        # front f2 = 1 - f1^2 for f1 in [m, 1]
        return (z2 - 1.0) * (1.0 - m) + (1.0 - m**3) / 3.0 + (z1 - 1.0) * z2
    raise ValueError(f"no known front for {name!r}")
