"""Greedy hybrid hypervolume maximization.

One point is optimized at a time. Each new point is found by exploration
(deterministic, chasing the midpoint of a region spanned by earlier points;
or stochastic, with a small evolutionary search once no regions remain), and
then exploited by maximizing its exclusive hypervolume contribution against
the fixed archive.
"""

from __future__ import annotations

import contextlib
import heapq
import itertools
import logging
from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np

from ._validation import check_positive_float, check_positive_int
from .boxmin import MinimizeResult, Termination, minimize
from .core import (
    Archive,
    BudgetExhausted,
    Candidate,
    EvaluationCounter,
    Problem,
    dominates,
    is_nondominated,
)
from .hypervolume import ContributionLandscape, UndefinedGradientError, hypervolume
from .variation import dominated_by_counts, polynomial_mutation, sbx_crossover

logger = logging.getLogger(__name__)

GRADIENT_MODES = ("numeric", "analytic")


@dataclass
class H2maConfig:
    """Run configuration.

    ``warmup_weight`` adds that multiple of the other objectives to each
    single-objective warm-up minimization so the warm-up points are Pareto
    optimal rather than merely optimal in one objective; 0 gives the plain
    single-objective warm-up.
    """

    budget: int = 20000
    target_point_count: int | None = None
    gradient_mode: str = "numeric"
    stochastic_population_min: int = 20
    rng_seed: int = 0
    max_iterations: int = 200
    gradient_tolerance: float = 1e-8
    relative_improvement_tolerance: float = 1e-10
    minimum_region_volume: float = 0.0
    warmup_weight: float = 1e-2
    crossover_eta: float = 10.0
    crossover_probability: float = 0.9
    mutation_eta: float = 20.0
    mutation_rate: float | None = None

    def validate(self, n_objectives: int = 2) -> H2maConfig:
        check_positive_int(self.budget, "budget")
        if self.target_point_count is not None:
            check_positive_int(self.target_point_count, "target_point_count")
        if self.gradient_mode not in GRADIENT_MODES:
            raise ValueError(f"gradient_mode must be one of {GRADIENT_MODES}, got {self.gradient_mode!r}")
        check_positive_int(self.stochastic_population_min, "stochastic_population_min",
                           minimum=n_objectives)
        check_positive_int(self.max_iterations, "max_iterations")
        check_positive_float(self.gradient_tolerance, "gradient_tolerance")
        check_positive_float(self.relative_improvement_tolerance, "relative_improvement_tolerance")
        if self.minimum_region_volume < 0:
            raise ValueError("minimum_region_volume must be >= 0")
        if self.warmup_weight < 0:
            raise ValueError("warmup_weight must be >= 0")
        return self

    def minimize_options(self) -> dict:
        return dict(max_iterations=self.max_iterations,
                    gradient_tolerance=self.gradient_tolerance,
                    relative_improvement_tolerance=self.relative_improvement_tolerance)


@dataclass(frozen=True, eq=False)
class Region:
    """M accepted candidates, their objective-space mean and box volume."""

    members: tuple[Candidate, ...]
    mid: np.ndarray
    volume: float
    sequence_id: int = 0


class RegionQueue:
    """Max-volume priority queue; equal volumes pop in creation order."""

    def __init__(self, regions: Sequence[Region] = ()):
        self._heap: list = []
        for r in regions:
            self.push(r)

    def push(self, region: Region) -> None:
        heapq.heappush(self._heap, (-region.volume, region.sequence_id, region))

    def pop(self) -> Region:
        return heapq.heappop(self._heap)[2]

    def __len__(self) -> int:
        return len(self._heap)

    def __bool__(self) -> bool:
        return bool(self._heap)


def create_region(candidates: Sequence[Candidate], sequence_id: int = 0,
                  minimum_volume: float = 0.0) -> Region | None:
    """Region spanned by ``candidates``, or ``None`` if its volume is not
    strictly positive (or not above ``minimum_volume``)."""
    Y = np.vstack([c.y for c in candidates])
    volume = float(np.prod(Y.max(axis=0) - Y.min(axis=0)))
    if not volume > 0 or volume < minimum_volume:
        return None
    return Region(tuple(candidates), Y.mean(axis=0), volume, sequence_id)


def create_regions(parent: Region, new_point: Candidate, next_id=None,
                   minimum_volume: float = 0.0) -> list[Region]:
    """Replace each parent member in turn by ``new_point``; drop empty regions."""
    ids = next_id if next_id is not None else itertools.count()
    M = len(parent.members)
    regions = []
    for subset in itertools.combinations(parent.members, M - 1):
        region = create_region(list(subset) + [new_point], next(ids), minimum_volume)
        if region is not None:
            regions.append(region)
    return regions


class _Evaluations:
    """Counted evaluations with a small cache, so analytic gradients at an
    iterate reuse the objective values computed there."""

    def __init__(self, problem: Problem, counter: EvaluationCounter, size: int = 8):
        self.problem = problem
        self.counter = counter
        self.size = size
        self._cache: dict[bytes, Candidate] = {}
        self.last: Candidate | None = None

    def __call__(self, x: np.ndarray) -> Candidate:
        c = self.problem.candidate(x, self.counter)
        if len(self._cache) >= self.size:
            self._cache.pop(next(iter(self._cache)))
        self._cache[x.tobytes()] = c
        self.last = c
        return c

    def lookup(self, x: np.ndarray) -> Candidate:
        c = self._cache.get(np.asarray(x, dtype=float).tobytes())
        return c if c is not None else self(np.asarray(x, dtype=float))

    def remember(self, c: Candidate) -> None:
        self._cache[c.x.tobytes()] = c


def _jacobian(problem: Problem, x: np.ndarray) -> np.ndarray:
    return np.asarray(problem.jacobian(x), dtype=float)


def _use_analytic(problem: Problem, config: H2maConfig) -> bool:
    if config.gradient_mode == "analytic":
        if problem.jacobian is None:
            raise ValueError(f"{problem.name} has no analytic Jacobian; use gradient_mode='numeric'")
        return True
    return False


def is_exploitable(y, archive: Archive, nadir, landscape: ContributionLandscape | None = None) -> bool:
    """Non-dominated w.r.t. the archive, strictly dominates the nadir point and
    has a positive exclusive contribution."""
    if not dominates(y, nadir):
        return False
    if not is_nondominated(y, archive):
        return False
    if landscape is None:
        landscape = ContributionLandscape(archive.objectives, nadir)
    return landscape.value(y) > 0


def create_initial_region(problem: Problem, counter: EvaluationCounter,
                          config: H2maConfig | None = None,
                          archive: Archive | None = None) -> tuple[RegionQueue, Archive]:
    """Minimize each objective from the box midpoint; the minimizers are
    appended to the archive and span the first region."""
    config = config or H2maConfig()
    archive = archive if archive is not None else Archive()
    analytic = _use_analytic(problem, config)
    x0 = problem.midpoint
    M = problem.n_objectives
    members = []
    for i in range(M):
        weights = np.full(M, config.warmup_weight)
        weights[i] = 1.0
        evals = _Evaluations(problem, counter)
        best: list[Candidate] = []

        def objective(x, weights=weights, evals=evals, best=best):
            c = evals(x)
            value = float(weights @ c.y)
            if not best or value < float(weights @ best[0].y):
                best[:] = [c]
            return value

        def gradient(x, weights=weights, evals=evals):
            evals.lookup(x)
            return weights @ _jacobian(problem, x)

        res = minimize(objective, x0, problem.bounds, gradient=gradient if analytic else None,
                       **config.minimize_options())
        if not best:
            break
        members.append(best[0])
        archive.append(best[0], "warmup", evaluations=counter.count)
        if res.termination_reason is Termination.BUDGET:
            break
    queue = RegionQueue()
    if len(members) == M:
        region = create_region(members, 0, config.minimum_region_volume)
        if region is not None:
            queue.push(region)
    return queue, archive


def explore_deterministic(problem: Problem, region: Region, archive: Archive,
                          counter: EvaluationCounter,
                          config: H2maConfig | None = None) -> Candidate | None:
    """Chase the region midpoint from the decision-space mean of its members,
    stopping at the first evaluated point (probes included) that can be
    exploited. Returns ``None`` if the search ends without one."""
    config = config or H2maConfig()
    analytic = _use_analytic(problem, config)
    nadir = problem.nadir
    landscape = ContributionLandscape(archive.objectives, nadir)
    x0 = np.mean([m.x for m in region.members], axis=0)
    x0 = np.clip(x0, problem.lower, problem.upper)
    evals = _Evaluations(problem, counter)
    start = evals(x0)
    if is_exploitable(start.y, archive, nadir, landscape):
        return start

    mid = region.mid

    def objective(x):
        r = evals(x).y - mid
        return 0.5 * float(r @ r)

    def gradient(x):
        c = evals.lookup(x)
        return _jacobian(problem, x).T @ (c.y - mid)

    def observer(x, f, k):
        return is_exploitable(evals.last.y, archive, nadir, landscape)

    r0 = start.y - mid
    res = minimize(objective, x0, problem.bounds, gradient=gradient if analytic else None,
                   f0=0.5 * float(r0 @ r0), observer=observer, **config.minimize_options())
    if res.termination_reason is Termination.OBSERVER_STOP:
        return evals.last
    return None


@dataclass
class ExploitResult:
    candidate: Candidate
    initial_contribution: float
    contribution: float
    minimize: MinimizeResult

    @property
    def budget_cut(self) -> bool:
        return self.minimize.termination_reason is Termination.BUDGET


def exploit(problem: Problem, x0: Candidate, archive: Archive, counter: EvaluationCounter,
            config: H2maConfig | None = None, nadir=None) -> ExploitResult:
    """Maximize the exclusive hypervolume contribution of one point against the
    fixed archive, starting from ``x0``.

    The contribution never decreases, so the returned point stays
    non-dominated.
    """
    config = config or H2maConfig()
    analytic = _use_analytic(problem, config)
    nadir = problem.nadir if nadir is None else np.asarray(nadir, dtype=float)
    landscape = ContributionLandscape(archive.objectives, nadir)
    c0 = landscape.value(x0.y)
    if not c0 > 0:
        raise ValueError("exploitation needs a starting point with positive contribution")
    evals = _Evaluations(problem, counter)
    evals.remember(x0)
    best = [x0, c0]

    def objective(x):
        c = evals(x)
        value = landscape.value(c.y)
        if value > best[1]:
            best[:] = [c, value]
        return -value

    def gradient(x):
        c = evals.lookup(x)
        try:
            gy = landscape.gradient(c.y)
        except UndefinedGradientError:
            gy = landscape.numeric_gradient(c.y)
        return -(_jacobian(problem, x).T @ gy)

    res = minimize(objective, x0.x, problem.bounds, gradient=gradient if analytic else None,
                   f0=-c0, **config.minimize_options())
    return ExploitResult(best[0], c0, best[1], res)


def explore_stochastic(problem: Problem, archive: Archive, counter: EvaluationCounter,
                       config: H2maConfig | None = None,
                       rng: np.random.Generator | None = None) -> Candidate | None:
    """Small evolutionary search seeded with the archive.

    The population holds every archive member and is topped up with uniform
    samples to ``stochastic_population_min``. Parents are picked by binary
    tournament and survivors by how few population members dominate them.
    The first evaluated point that can be exploited is returned; ``None``
    means the budget ran out first.
    """
    config = config or H2maConfig()
    rng = rng if rng is not None else np.random.default_rng(config.rng_seed)
    nadir = problem.nadir
    lower, upper = problem.bounds
    landscape = ContributionLandscape(archive.objectives, nadir)
    size = max(config.stochastic_population_min, len(archive))
    X = [m.x for m in archive]
    Y = [m.y for m in archive]
    try:
        while len(X) < size:
            c = problem.candidate(lower + (upper - lower) * rng.random(problem.n), counter)
            if is_exploitable(c.y, archive, nadir, landscape):
                return c
            X.append(c.x)
            Y.append(c.y)
        X = np.array(X)
        Y = np.array(Y)
        while True:
            ranks = dominated_by_counts(Y)
            children_x, children_y = [], []
            while len(children_x) < size:
                parents = []
                for _ in range(2):
                    i, j = rng.integers(size, size=2)
                    parents.append(i if ranks[i] <= ranks[j] else j)
                kids = sbx_crossover(X[parents[0]], X[parents[1]], lower, upper, rng,
                                     eta=config.crossover_eta,
                                     probability=config.crossover_probability)
                for kid in kids:
                    kid = polynomial_mutation(kid, lower, upper, rng, eta=config.mutation_eta,
                                              rate=config.mutation_rate)
                    c = problem.candidate(kid, counter)
                    if is_exploitable(c.y, archive, nadir, landscape):
                        return c
                    children_x.append(c.x)
                    children_y.append(c.y)
            X = np.vstack([X, children_x])
            Y = np.vstack([Y, children_y])
            keep = np.argsort(dominated_by_counts(Y), kind="stable")[:size]
            X, Y = X[keep], Y[keep]
    except BudgetExhausted:
        return None


@dataclass
class RunTrace:
    """Snapshots ``(evaluations, hypervolume, p_distance)`` of one run, taken
    at every archive append and at trace-interval boundaries."""

    snapshots: list[tuple[int, float, float]] = field(default_factory=list)

    def record(self, evaluations: int, hv: float, p: float) -> None:
        if self.snapshots and self.snapshots[-1][0] == evaluations:
            self.snapshots[-1] = (evaluations, hv, p)
        elif self.snapshots and self.snapshots[-1][0] > evaluations:
            raise ValueError("snapshots must be recorded in evaluation order")
        else:
            self.snapshots.append((evaluations, hv, p))

    def at(self, evaluations: int) -> tuple[int, float, float] | None:
        """Latest snapshot taken at or before ``evaluations``."""
        latest = None
        for snap in self.snapshots:
            if snap[0] > evaluations:
                break
            latest = snap
        return latest

    def with_boundaries(self, interval: int, final: int) -> RunTrace:
        """Copy with a carried-forward snapshot at every multiple of
        ``interval`` up to ``final``."""
        interval = check_positive_int(interval, "interval")
        out = RunTrace()
        boundaries = list(range(interval, final + 1, interval))
        merged = sorted(set([s[0] for s in self.snapshots] + boundaries))
        for e in merged:
            snap = self.at(e)
            if snap is not None:
                out.record(e, snap[1], snap[2])
        return out

    def __len__(self) -> int:
        return len(self.snapshots)


@dataclass
class RunStats:
    stochastic_calls: int = 0
    deterministic_successes: int = 0
    deterministic_failures: int = 0
    exploited: int = 0
    queue_sizes: list[int] = field(default_factory=list)
    evaluations_by_step: dict[str, int] = field(default_factory=lambda: {
        "warmup": 0, "explore_deterministic": 0, "explore_stochastic": 0, "exploit": 0})
    evaluations: int = 0


@dataclass
class RunResult:
    archive: Archive
    trace: RunTrace
    stats: RunStats

    def __iter__(self):
        return iter((self.archive, self.trace))


def build_trace(problem: Problem, archive: Archive) -> RunTrace:
    """Hypervolume and p-distance of the non-dominated archive after every append."""
    trace = RunTrace()
    Y = archive.objectives
    alive = np.zeros(len(archive), dtype=bool)
    for k, (member, stamp) in enumerate(zip(archive, archive.stamps)):
        y = member.y
        alive[:k] &= ~np.all(y < Y[:k], axis=1)
        alive[k] = not np.any(np.all(Y[:k][alive[:k]] < y, axis=1))
        front = [archive[i] for i in np.flatnonzero(alive[:k + 1])]
        hv = hypervolume(Y[:k + 1][alive[:k + 1]], problem.nadir)
        trace.record(stamp, hv, problem.p_distance(front))
    return trace


def run(problem: Problem, config: H2maConfig | None = None,
        trace_interval: int | None = None) -> RunResult:
    """Run the hybrid greedy optimizer on ``problem`` until the evaluation
    budget or the target point count is reached."""
    config = (config or H2maConfig()).validate(problem.n_objectives)
    _use_analytic(problem, config)
    counter = EvaluationCounter(config.budget)
    rng = np.random.default_rng(config.rng_seed)
    stats = RunStats()
    steps = stats.evaluations_by_step
    ids = itertools.count(1)

    def target_met():
        return config.target_point_count is not None and stats.exploited >= config.target_point_count

    @contextlib.contextmanager
    def charge(step):
        before = counter.count
        try:
            yield
        finally:
            steps[step] += counter.count - before

    with charge("warmup"):
        queue, archive = create_initial_region(problem, counter, config)

    def accept(start: Candidate, phase: str) -> bool:
        with charge("exploit"):
            result = exploit(problem, start, archive, counter, config)
        if result.budget_cut:
            # unconverged exploitation is discarded
            return False
        archive.append(result.candidate, phase, evaluations=counter.count)
        stats.exploited += 1
        return True

    try:
        while queue and not counter.exhausted and not target_met():
            stats.queue_sizes.append(len(queue))
            region = queue.pop()
            with charge("explore_deterministic"):
                start = explore_deterministic(problem, region, archive, counter, config)
            if start is None:
                stats.deterministic_failures += 1
                continue
            stats.deterministic_successes += 1
            if not accept(start, "deterministic"):
                break
            point = archive[-1]
            for child in create_regions(region, point, ids, config.minimum_region_volume):
                queue.push(child)

        while not counter.exhausted and not target_met():
            stats.stochastic_calls += 1
            with charge("explore_stochastic"):
                start = explore_stochastic(problem, archive, counter, config, rng)
            if start is None or not accept(start, "stochastic"):
                break
    except BudgetExhausted:
        pass

    stats.evaluations = counter.count
    logger.info("%s: %d points, %d evaluations, %d stochastic calls", problem.name,
                len(archive), counter.count, stats.stochastic_calls)
    trace = build_trace(problem, archive)
    if trace_interval:
        trace = trace.with_boundaries(trace_interval, config.budget)
    return RunResult(archive, trace, stats)
