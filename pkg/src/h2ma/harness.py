"""Experiment protocol: repeated seeded runs, percentile tables, CSV output
and the numeric-versus-analytic gradient cost comparison."""

from __future__ import annotations

import csv
import io
import os
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from ._validation import check_points, check_positive_int
from .core import Archive, nondominated_mask
from .hypervolume import hypervolume
from .optimizer import H2maConfig, RunResult, RunTrace, run
from .zdt import PROBLEM_NAMES, make_problem

PERCENTILES = (0, 25, 50, 75, 100)
METRICS = ("hypervolume", "p_distance")
PERCENTILE_HEADER = ["evals", "metric"] + [f"p{q}" for q in PERCENTILES]


def _fmt(v) -> str:
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    v = float(v)
    if v == 0.0:
        return "0"
    return format(v, ".17g")


def percentiles(values) -> np.ndarray:
    """p0, p25, p50, p75 and p100 with linear interpolation between order
    statistics. The input is sorted first, so run order never matters."""
    values = np.sort(np.asarray(values, dtype=float))
    if values.size == 0:
        raise ValueError("percentiles of an empty sample")
    return np.percentile(values, PERCENTILES, method="linear")


@dataclass(frozen=True)
class ExperimentConfig:
    problem: str
    n: int = 30
    budget: int = 20000
    runs: int = 100
    trace_interval: int = 2000
    gradient_mode: str = "numeric"
    seed: int = 0
    output: str | None = None
    workers: int = 1

    def validate(self) -> ExperimentConfig:
        if self.problem.lower() not in PROBLEM_NAMES:
            raise ValueError(f"unknown problem {self.problem!r}; choose from {', '.join(PROBLEM_NAMES)}")
        check_positive_int(self.n, "n", minimum=2)
        check_positive_int(self.budget, "budget")
        check_positive_int(self.runs, "runs")
        check_positive_int(self.trace_interval, "trace_interval")
        check_positive_int(self.workers, "workers")
        if self.budget % self.trace_interval:
            raise ValueError(f"trace_interval {self.trace_interval} does not divide budget {self.budget}")
        if self.gradient_mode not in ("numeric", "analytic"):
            raise ValueError(f"gradient_mode must be 'numeric' or 'analytic', got {self.gradient_mode!r}")
        return self

    def h2ma_config(self, run_index: int) -> H2maConfig:
        return H2maConfig(budget=self.budget, gradient_mode=self.gradient_mode,
                          rng_seed=self.seed + run_index)


@dataclass
class ExperimentResult:
    """Per-boundary percentile rows for both metrics.

    ``table[metric]`` has one row per trace boundary, columns ``evals`` then
    the five percentiles. ``traces`` are the boundary-sampled run traces in
    seed order.
    """

    config: ExperimentConfig
    boundaries: np.ndarray
    table: dict[str, np.ndarray]
    traces: list[RunTrace]

    def rows(self):
        for metric in METRICS:
            for e, row in zip(self.boundaries, self.table[metric]):
                yield [int(e), metric, *row]


def _single(config: ExperimentConfig, index: int) -> RunTrace:
    problem = make_problem(config.problem, config.n)
    result = run(problem, config.h2ma_config(index))
    return boundary_samples(result.trace, config.trace_interval, config.budget)


def boundary_samples(trace: RunTrace, interval: int, budget: int) -> RunTrace:
    """Latest snapshot at or before each multiple of ``interval``, carried
    forward through boundaries where the run made no progress."""
    out = RunTrace()
    for e in range(interval, budget + 1, interval):
        snap = trace.at(e)
        if snap is None:
            out.record(e, 0.0, float("nan"))
        else:
            out.record(e, snap[1], snap[2])
    return out


def aggregate(traces, interval: int, budget: int):
    """Percentile table per metric from boundary-sampled traces."""
    boundaries = np.arange(interval, budget + 1, interval)
    table = {}
    for k, metric in enumerate(METRICS, start=1):
        rows = []
        for i, e in enumerate(boundaries):
            values = [t.snapshots[i][k] for t in traces]
            assert all(t.snapshots[i][0] == e for t in traces)
            rows.append(percentiles(values))
        table[metric] = np.array(rows)
    return boundaries, table


def run_experiment(config: ExperimentConfig) -> ExperimentResult:
    """Run ``config.runs`` seeded H2MA runs and aggregate their traces.

    Writes CSV files when ``config.output`` is set; nothing is written if any
    run fails.
    """
    config.validate()
    indices = range(config.runs)
    if config.workers > 1:
        from joblib import Parallel, delayed

        traces = Parallel(n_jobs=config.workers)(delayed(_single)(config, i) for i in indices)
    else:
        traces = [_single(config, i) for i in indices]
    boundaries, table = aggregate(traces, config.trace_interval, config.budget)
    result = ExperimentResult(config, boundaries, table, traces)
    if config.output is not None:
        write_experiment(result, config.output)
    return result


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) if not isinstance(v, str) else v for v in row])
    return buf.getvalue()


def _write_all(files: dict[Path, str]) -> None:
    for path, text in files.items():
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            tmp = path.with_name(path.name + ".tmp")
            tmp.write_text(text)
            os.replace(tmp, path)
        except OSError as exc:
            raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc


def write_experiment(result: ExperimentResult, output) -> list[Path]:
    """Write ``{problem}_{metric}.csv`` files and the combined
    ``percentiles.csv`` into the directory ``output``."""
    out = Path(output)
    name = result.config.problem.lower()
    rows = list(result.rows())
    files = {out / "percentiles.csv": _csv_text(PERCENTILE_HEADER, rows)}
    for metric in METRICS:
        files[out / f"{name}_{metric}.csv"] = _csv_text(
            PERCENTILE_HEADER, [r for r in rows if r[1] == metric])
    _write_all(files)
    return list(files)


def _first_crossing(trace: RunTrace, level: float) -> int | None:
    for e, hv, _ in trace.snapshots:
        if hv >= level:
            return e
    return None


def compare_gradient_modes(problem: str, budget: int = 20000, seed: int = 0, n: int = 30):
    """Evaluations each gradient mode needs to reach the same hypervolume.

    Runs H2MA once per mode. Every hypervolume value appearing in either
    trace that both runs reach becomes a level; rows are
    ``(H, evals_numeric, evals_analytic, evals_numeric / evals_analytic)``
    sorted by ``H``.
    """
    key = problem.lower()
    if key not in PROBLEM_NAMES or key == "zdt6":
        raise ValueError(f"gradient comparison supports zdt1..zdt4, got {problem!r}")
    prob = make_problem(key, n)
    base = H2maConfig(budget=budget, rng_seed=seed)
    traces = {mode: run(prob, replace(base, gradient_mode=mode)).trace
              for mode in ("numeric", "analytic")}
    levels = sorted({s[1] for t in traces.values() for s in t.snapshots if s[1] > 0})
    rows = []
    for h in levels:
        en = _first_crossing(traces["numeric"], h)
        ea = _first_crossing(traces["analytic"], h)
        if en is None or ea is None:
            continue
        rows.append((h, en, ea, en / ea))
    return rows


GRADCMP_HEADER = ["hypervolume", "evals_numeric", "evals_analytic", "ratio"]


def archive_csv(archive: Archive) -> str:
    """Archive dump, one row per member in acceptance order:
    ``t,x_1..x_n,f_1..f_M,g,phase``."""
    members = archive.members
    n = members[0].x.shape[0] if members else 0
    m = members[0].y.shape[0] if members else 2
    header = ["t", *(f"x_{i}" for i in range(1, n + 1)), *(f"f_{i}" for i in range(1, m + 1)),
              "g", "phase"]
    rows = []
    for t, (c, phase) in enumerate(zip(members, archive.phases)):
        g = "" if c.g is None else _fmt(c.g)
        rows.append([t, *c.x, *c.y, g, phase])
    return _csv_text(header, rows)


def write_run(result: RunResult, path) -> Path:
    path = Path(path)
    _write_all({path: archive_csv(result.archive)})
    return path


def read_points(path) -> np.ndarray:
    """Objective vectors from a CSV file.

    Accepts a headerless two-column file, or any file with a header whose
    ``f_1``/``f_2`` columns (or first two columns) hold the objectives.
    """
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise OSError(f"cannot read {path}: {exc.strerror or exc}") from exc
    rows = [r for r in csv.reader(io.StringIO(text)) if r and any(c.strip() for c in r)]
    if not rows:
        return np.empty((0, 2))
    cols = (0, 1)
    try:
        [float(c) for c in rows[0][:2]]
    except ValueError:
        header = [c.strip() for c in rows[0]]
        rows = rows[1:]
        if "f_1" in header and "f_2" in header:
            cols = (header.index("f_1"), header.index("f_2"))
    try:
        pts = [[float(r[cols[0]]), float(r[cols[1]])] for r in rows]
    except (ValueError, IndexError) as exc:
        raise ValueError(f"{path}: expected two numeric objective columns ({exc})") from exc
    return check_points(np.array(pts).reshape(-1, 2))


def hv_of_file(path, nadir) -> float:
    """Hypervolume of the non-dominated points stored in ``path``."""
    points = read_points(path)
    if points.shape[0] == 0:
        return 0.0
    return hypervolume(points[nondominated_mask(points)], nadir)
