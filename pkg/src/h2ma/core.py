"""Domain primitives: objective vectors, strict dominance, candidates, the
greedy archive and evaluation accounting."""

from __future__ import annotations

from collections.abc import Callable, Iterable, Sequence
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from ._validation import check_bounds, check_decision_vector, check_objective_vector


class BudgetExhausted(RuntimeError):
    """Raised when an evaluation is requested after the budget is spent."""


class EvaluationCounter:
    """Counts objective-function evaluations against a hard budget.

    ``tick`` is called *before* each evaluation, so ``count`` never exceeds
    ``budget``.
    """

    def __init__(self, budget: int):
        if int(budget) <= 0:
            raise ValueError(f"budget must be positive, got {budget}")
        self.budget = int(budget)
        self.count = 0

    @property
    def remaining(self) -> int:
        return self.budget - self.count

    @property
    def exhausted(self) -> bool:
        return self.count >= self.budget

    def tick(self) -> None:
        if self.count >= self.budget:
            raise BudgetExhausted(f"evaluation budget of {self.budget} exhausted")
        self.count += 1

    def wrap(self, fun: Callable) -> Callable:
        """Return ``fun`` with every call counted."""

        def counted(*args, **kwargs):
            self.tick()
            return fun(*args, **kwargs)

        return counted

    def __repr__(self) -> str:
        return f"EvaluationCounter(count={self.count}, budget={self.budget})"


def dominates(a, b) -> bool:
    """Strict dominance: every coordinate of ``a`` is below that of ``b``."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise ValueError(f"objective vectors differ in length: {a.shape} vs {b.shape}")
    return bool(np.all(a < b))


class Evaluation(NamedTuple):
    """Objective values of one decision vector, plus the optional auxiliary
    ``g`` value some benchmark families expose."""

    y: np.ndarray
    g: float | None = None


@dataclass(frozen=True, eq=False)
class Candidate:
    """A decision vector paired with its (cached) objective vector."""

    x: np.ndarray
    y: np.ndarray
    g: float | None = None

    def __post_init__(self):
        x = np.array(self.x, dtype=float)
        y = check_objective_vector(self.y)
        x.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    def __repr__(self) -> str:
        return f"Candidate(y={self.y.tolist()}, g={self.g})"


def _objective_matrix(items: Iterable) -> np.ndarray:
    rows = [c.y if isinstance(c, Candidate) else np.asarray(c, dtype=float) for c in items]
    if not rows:
        return np.empty((0, 0))
    return np.vstack(rows)


def is_nondominated(y, archive: Iterable) -> bool:
    """True iff no member of ``archive`` strictly dominates ``y``.

    ``archive`` may be an :class:`Archive`, a sequence of candidates or an
    array of objective vectors.
    """
    Y = archive.objectives if isinstance(archive, Archive) else _objective_matrix(archive)
    if Y.size == 0:
        return True
    y = np.asarray(y, dtype=float)
    return not bool(np.any(np.all(Y < y, axis=1)))


def nondominated_mask(Y: np.ndarray) -> np.ndarray:
    """Boolean mask of rows of ``Y`` not strictly dominated by another row."""
    Y = np.asarray(Y, dtype=float)
    if Y.shape[0] == 0:
        return np.zeros(0, dtype=bool)
    dominated = np.zeros(Y.shape[0], dtype=bool)
    # chunked to keep the (k, N, M) comparison small
    step = max(1, 2_000_000 // max(1, Y.shape[0] * Y.shape[1]))
    for start in range(0, Y.shape[0], step):
        block = Y[start:start + step]
        dominated[start:start + step] = np.any(
            np.all(Y[None, :, :] < block[:, None, :], axis=2), axis=1
        )
    return ~dominated


def nondominated_filter(archive: Iterable) -> list:
    """Members not strictly dominated by any other member, in insertion order."""
    members = list(archive.members if isinstance(archive, Archive) else archive)
    if not members:
        return []
    mask = nondominated_mask(_objective_matrix(members))
    return [m for m, keep in zip(members, mask) if keep]


PHASES = ("warmup", "deterministic", "stochastic")


class Archive:
    """Append-only ordered set of accepted candidates.

    Insertion order is the greedy order of the construction. Dominated members
    are kept for provenance; reporting goes through :meth:`nondominated`.
    """

    def __init__(self, members: Iterable[Candidate] = (), phases: Iterable[str] | None = None):
        self._members: list[Candidate] = []
        self._phases: list[str] = []
        self._stamps: list[int | None] = []
        self._Y: np.ndarray | None = None
        members = list(members)
        phases = list(phases) if phases is not None else ["deterministic"] * len(members)
        for c, p in zip(members, phases, strict=True):
            self.append(c, p)

    def append(self, candidate: Candidate, phase: str = "deterministic",
               evaluations: int | None = None) -> None:
        """Append ``candidate``; ``evaluations`` stamps the evaluation count at
        which it was accepted."""
        if phase not in PHASES:
            raise ValueError(f"unknown phase {phase!r}; expected one of {PHASES}")
        if self._members and candidate.y.shape != self._members[0].y.shape:
            raise ValueError("objective count differs from existing archive members")
        self._members.append(candidate)
        self._phases.append(phase)
        self._stamps.append(evaluations)
        self._Y = None

    @property
    def members(self) -> list[Candidate]:
        return list(self._members)

    @property
    def phases(self) -> list[str]:
        return list(self._phases)

    @property
    def stamps(self) -> list[int | None]:
        return list(self._stamps)

    @property
    def objectives(self) -> np.ndarray:
        if self._Y is None:
            self._Y = _objective_matrix(self._members)
            self._Y.setflags(write=False)
        return self._Y

    def nondominated(self) -> list[Candidate]:
        return nondominated_filter(self._members)

    def __len__(self) -> int:
        return len(self._members)

    def __iter__(self):
        return iter(self._members)

    def __getitem__(self, i):
        return self._members[i]

    def __repr__(self) -> str:
        return f"Archive(n={len(self)})"


@dataclass(frozen=True, eq=False)
class Problem:
    """A box-constrained multi-objective problem.

    ``fun`` maps a decision vector to its objective vector, or to an
    :class:`Evaluation` when the problem carries an auxiliary value.
    ``jacobian`` (optional) maps a decision vector to the ``(M, n)`` matrix of
    partial derivatives and is never counted as an evaluation.
    """

    name: str
    lower: np.ndarray
    upper: np.ndarray
    nadir: np.ndarray
    fun: Callable[[np.ndarray], object]
    jacobian: Callable[[np.ndarray], np.ndarray] | None = None
    n_objectives: int = field(init=False)

    def __post_init__(self):
        lower, upper = check_bounds(self.lower, self.upper)
        nadir = check_objective_vector(self.nadir)
        for arr in (lower, upper, nadir):
            arr.setflags(write=False)
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)
        object.__setattr__(self, "nadir", nadir)
        object.__setattr__(self, "n_objectives", nadir.shape[0])

    @property
    def n(self) -> int:
        return self.lower.shape[0]

    @property
    def bounds(self) -> tuple[np.ndarray, np.ndarray]:
        return self.lower, self.upper

    @property
    def midpoint(self) -> np.ndarray:
        return 0.5 * (self.lower + self.upper)

    def evaluate(self, x, counter: EvaluationCounter | None = None) -> Evaluation:
        x = check_decision_vector(x, self.lower, self.upper)
        if counter is not None:
            counter.tick()
        out = self.fun(x)
        if isinstance(out, Evaluation):
            y, g = out
        else:
            y, g = out, None
        y = check_objective_vector(y)
        if y.shape[0] != self.n_objectives:
            raise ValueError(f"{self.name}: expected {self.n_objectives} objectives, got {y.shape[0]}")
        return Evaluation(y, g)

    def candidate(self, x, counter: EvaluationCounter | None = None) -> Candidate:
        y, g = self.evaluate(x, counter)
        return Candidate(x, y, g)

    def p_distance(self, candidates: Sequence[Candidate]) -> float:
        """Convergence metric; only meaningful for problems with a known front."""
        return float("nan")
