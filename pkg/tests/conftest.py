import functools

import numpy as np
import pytest

from h2ma.optimizer import H2maConfig, run
from h2ma.zdt import ZdtProblem, make_problem

ACCEPTANCE_LINES: list[str] = []


class CallCount:
    """Wraps a problem's objective to count raw calls independently of the
    optimizer's own counter."""

    def __init__(self, fun):
        self.fun = fun
        self.calls = 0

    def __call__(self, x):
        self.calls += 1
        return self.fun(x)


def instrumented(name, n=30):
    base = make_problem(name, n)
    probe = CallCount(base.fun)
    problem = ZdtProblem(name=base.name, lower=base.lower, upper=base.upper, nadir=base.nadir,
                         fun=probe, jacobian=base.jacobian)
    return problem, probe


BUDGET_LOG: list[tuple[str, int, int, int]] = []


@functools.lru_cache(maxsize=None)
def full_run(name, mode="numeric", seed=0, budget=20000):
    """One instrumented full-budget run, shared between test modules."""
    problem, probe = instrumented(name)
    result = run(problem, H2maConfig(budget=budget, gradient_mode=mode, rng_seed=seed))
    BUDGET_LOG.append((f"{name}/{mode}/seed{seed}", budget, result.stats.evaluations, probe.calls))
    return problem, result


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
