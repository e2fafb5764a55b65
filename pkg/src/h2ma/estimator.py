"""Estimator-style front end.

``H2MA`` keeps its hyperparameters as constructor arguments, so
``get_params``/``set_params``/``clone`` work, and ``fit`` takes a
:class:`~h2ma.core.Problem` in place of a data matrix.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .core import Problem
from .hypervolume import hypervolume
from .optimizer import H2maConfig, run
from .zdt import make_problem


class H2MA(BaseEstimator):
    """Hybrid hypervolume maximization as an estimator.

    Parameters mirror :class:`~h2ma.optimizer.H2maConfig`; ``random_state``
    seeds the stochastic explorer.

    Attributes
    ----------
    archive_ : Archive
        Every accepted point in acceptance order.
    pareto_front_ : ndarray of shape (k, M)
        Objective vectors of the non-dominated archive members.
    pareto_set_ : ndarray of shape (k, n)
        Their decision vectors.
    trace_ : RunTrace
    stats_ : RunStats
    n_evaluations_ : int
    hypervolume_ : float
        Hypervolume of ``pareto_front_`` against the problem nadir.
    """

    def __init__(self, budget=20000, target_point_count=None, gradient_mode="numeric",
                 stochastic_population_min=20, random_state=0, max_iterations=200,
                 gradient_tolerance=1e-8, relative_improvement_tolerance=1e-10,
                 minimum_region_volume=0.0, warmup_weight=1e-2, trace_interval=None):
        self.budget = budget
        self.target_point_count = target_point_count
        self.gradient_mode = gradient_mode
        self.stochastic_population_min = stochastic_population_min
        self.random_state = random_state
        self.max_iterations = max_iterations
        self.gradient_tolerance = gradient_tolerance
        self.relative_improvement_tolerance = relative_improvement_tolerance
        self.minimum_region_volume = minimum_region_volume
        self.warmup_weight = warmup_weight
        self.trace_interval = trace_interval

    def _config(self) -> H2maConfig:
        seed = self.random_state
        if seed is None or isinstance(seed, np.random.Generator):
            raise ValueError("random_state must be an int; runs are seeded explicitly")
        return H2maConfig(
            budget=self.budget,
            target_point_count=self.target_point_count,
            gradient_mode=self.gradient_mode,
            stochastic_population_min=self.stochastic_population_min,
            rng_seed=int(seed),
            max_iterations=self.max_iterations,
            gradient_tolerance=self.gradient_tolerance,
            relative_improvement_tolerance=self.relative_improvement_tolerance,
            minimum_region_volume=self.minimum_region_volume,
            warmup_weight=self.warmup_weight,
        )

    def fit(self, problem, y=None):
        """Optimize ``problem``, a :class:`Problem` or a benchmark name."""
        if isinstance(problem, str):
            problem = make_problem(problem)
        if not isinstance(problem, Problem):
            raise TypeError(f"fit expects a Problem or a benchmark name, got {type(problem).__name__}")
        result = run(problem, self._config(), trace_interval=self.trace_interval)
        front = result.archive.nondominated()
        self.problem_ = problem
        self.archive_ = result.archive
        self.trace_ = result.trace
        self.stats_ = result.stats
        self.n_evaluations_ = result.stats.evaluations
        self.pareto_front_ = np.array([c.y for c in front]).reshape(-1, problem.n_objectives)
        self.pareto_set_ = np.array([c.x for c in front]).reshape(-1, problem.n)
        self.hypervolume_ = hypervolume(self.pareto_front_, problem.nadir) if front else 0.0
        return self

    def score(self, problem=None, y=None) -> float:
        """Hypervolume of the fitted front, against ``problem``'s nadir if given."""
        check_is_fitted(self, "archive_")
        nadir = (problem if problem is not None else self.problem_).nadir
        if len(self.pareto_front_) == 0:
            return 0.0
        return hypervolume(self.pareto_front_, nadir)
