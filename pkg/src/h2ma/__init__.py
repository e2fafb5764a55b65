"""Hybrid hypervolume maximization for bi-objective box-constrained problems."""

from .boxmin import MinimizeResult, Termination, minimize, numeric_gradient
from .core import (
    Archive,
    BudgetExhausted,
    Candidate,
    Evaluation,
    EvaluationCounter,
    Problem,
    dominates,
    is_nondominated,
    nondominated_filter,
)
from .estimator import H2MA
from .harness import ExperimentConfig, compare_gradient_modes, hv_of_file, run_experiment
from .hypervolume import (
    ContributionLandscape,
    UndefinedGradientError,
    UnsupportedDimensionError,
    contribution,
    contribution_gradient,
    hypervolume,
)
from .optimizer import H2maConfig, RunResult, RunTrace, run
from .zdt import ZdtProblem, make_problem, max_front_hypervolume, p_distance

__all__ = [
    "Archive", "BudgetExhausted", "Candidate", "ContributionLandscape", "Evaluation",
    "EvaluationCounter", "ExperimentConfig", "H2MA", "H2maConfig", "MinimizeResult", "Problem",
    "RunResult", "RunTrace", "Termination", "UndefinedGradientError",
    "UnsupportedDimensionError", "ZdtProblem", "compare_gradient_modes", "contribution",
    "contribution_gradient", "dominates", "hv_of_file", "hypervolume", "is_nondominated",
    "make_problem", "max_front_hypervolume", "minimize", "nondominated_filter",
    "numeric_gradient", "p_distance", "run", "run_experiment",
]

__version__ = "0.1.0"
