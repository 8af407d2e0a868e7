"""Experiment drivers: efficiency grids, alpha sweeps, long runs and ensemble means.

Every grid point is an independent task; results are sorted after collection so
output does not depend on the number of worker processes.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .integrator import DivergenceError, expected_force_evals, integrate, state_distance
from .schemes import SplittingScheme
from .systems import HH_CHAOTIC_ALPHA, HH_INTEGRABLE_ALPHA, PROBLEMS, make_problem

METRICS = ("max_rel_energy_error", "mean_log10_energy_error", "final_state_error")
RANDOM_PROBLEMS = ("random_cubic", "random_quartic")
DEFAULT_COST_RATE = 10**1.25  # force evaluations per unit time in the alpha sweep

CSV_HEADER = "scheme,problem,seed,h_requested,h_actual,steps,force_evals,metric,value,wall_time_s"


class SpecError(ValueError):
    """Invalid experiment setup."""


@dataclass(frozen=True)
class ProblemSpec:
    problem: str
    dim: int | None = None
    seed: int = 0
    alpha: float | None = None

    def build(self):
        return make_problem(self.problem, self.dim, self.seed, self.alpha)

    @property
    def label(self) -> str:
        if self.problem == "henon_heiles":
            return "henon_heiles" if self.alpha in (None, 0.5) else f"henon_heiles(alpha={self.alpha!r})"
        if self.problem in RANDOM_PROBLEMS:
            return f"{self.problem}(d={self.dim or 2})"
        return f"{self.problem}(d={self.dim or 1})"


@dataclass(frozen=True)
class ExperimentSpec:
    """Either ``h_values`` (step sizes) or ``cost_rates`` (force evals per unit
    time, giving ``h = stages / rate`` per scheme) must be non-empty."""

    schemes: tuple[SplittingScheme, ...]
    problem: str
    t_final: float
    h_values: tuple[float, ...] = ()
    cost_rates: tuple[float, ...] = ()
    seeds: tuple[int, ...] = (0,)
    dim: int | None = None
    alpha: float | None = None
    metric: str = "max_rel_energy_error"

    def check(self) -> None:
        if not self.schemes:
            raise SpecError("no schemes given")
        if self.problem not in PROBLEMS:
            raise SpecError(f"unknown problem {self.problem!r}")
        if not self.h_values and not self.cost_rates:
            raise SpecError("empty step-size grid")
        if any(not h > 0 for h in self.h_values) or any(not r > 0 for r in self.cost_rates):
            raise SpecError("step sizes and cost rates must be positive")
        if not self.seeds:
            raise SpecError("seed list is empty")
        if not self.t_final > 0:
            raise SpecError("t_final must be positive")
        if self.metric not in METRICS:
            raise SpecError(f"unknown metric {self.metric!r}; choose from {', '.join(METRICS)}")

    def points(self) -> list[tuple[SplittingScheme, float, int]]:
        out = []
        for scheme in self.schemes:
            hs = list(self.h_values) + [scheme.stages / r for r in self.cost_rates]
            for h in hs:
                for seed in self.seeds:
                    out.append((scheme, h, seed))
        return out


@dataclass
class ExperimentResult:
    scheme: str
    problem: str
    seed: int
    h_requested: float
    h_actual: float
    steps: int
    force_evals: int
    metric: str
    value: float
    wall_time: float
    diverged: bool = False
    alpha: float | None = None
    extra: dict = field(default_factory=dict)

    def sort_key(self):
        return (self.scheme, -1.0 if self.alpha is None else self.alpha, self.h_requested, self.seed)

    def csv_row(self, timing: bool = True, with_alpha: bool = False) -> str:
        cols = [self.scheme, self.problem]
        if with_alpha:
            cols.append(repr(self.alpha))
        cols += [
            str(self.seed),
            repr(self.h_requested),
            repr(self.h_actual),
            str(self.steps),
            str(self.force_evals),
            self.metric,
            "inf" if self.diverged else repr(self.value),
            repr(round(self.wall_time, 6)) if timing else "0.0",
        ]
        return ",".join(cols)

    def as_dict(self, timing: bool = True) -> dict:
        d = {
            "scheme": self.scheme,
            "problem": self.problem,
            "seed": self.seed,
            "h_requested": self.h_requested,
            "h_actual": self.h_actual,
            "steps": self.steps,
            "force_evals": self.force_evals,
            "metric": self.metric,
            "value": None if self.diverged else self.value,
            "diverged": self.diverged,
            "wall_time_s": self.wall_time if timing else 0.0,
        }
        if self.alpha is not None:
            d["alpha"] = self.alpha
        return d


def max_relative_energy_error(energies: np.ndarray) -> float:
    e0 = energies[0]
    if e0 == 0:
        raise ValueError("relative energy error undefined for E(0) = 0")
    return float(np.max(np.abs((energies - e0) / e0)))


def mean_error(ensemble: Iterable[np.ndarray]) -> float:
    """Mean over runs of ``log10(max_t |(E(t) - E(0)) / E(0)|)``."""
    logs = [math.log10(max_relative_energy_error(np.asarray(e))) for e in ensemble]
    if not logs:
        raise ValueError("empty ensemble")
    return math.fsum(logs) / len(logs)


def _run_point(args) -> ExperimentResult:
    scheme, problem, h, t_final, metric = args
    system, x0 = problem.build()
    n_steps = max(1, round(t_final / h))
    start = time.perf_counter()
    diverged = False
    value = math.inf
    try:
        traj = integrate(scheme, system, x0, h, t_final, store_states=False)
        if metric == "final_state_error":
            if system.exact is not None:
                ref = system.exact(x0, t_final)
            else:
                ref = integrate(scheme, system, x0, h / 8, t_final, store_states=False).final
            value = state_distance(traj.final, ref)
        else:
            value = max_relative_energy_error(traj.energies)
            if metric == "mean_log10_energy_error":
                value = math.log10(value) if value > 0 else -math.inf
        if not math.isfinite(value) and value != -math.inf:
            diverged = True
    except DivergenceError:
        diverged = True
    wall = time.perf_counter() - start
    return ExperimentResult(
        scheme=scheme.name,
        problem=problem.label,
        seed=problem.seed,
        h_requested=float(h),
        h_actual=t_final / n_steps,
        steps=n_steps,
        force_evals=expected_force_evals(scheme, n_steps),
        metric=metric,
        value=value,
        wall_time=wall,
        diverged=diverged,
        alpha=problem.alpha,
    )


def _execute(tasks: Sequence, jobs: int) -> list[ExperimentResult]:
    if jobs <= 1 or len(tasks) <= 1:
        results = [_run_point(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_point, tasks, chunksize=1))
    return sorted(results, key=ExperimentResult.sort_key)


def run_efficiency(spec: ExperimentSpec, jobs: int = 1) -> list[ExperimentResult]:
    spec.check()
    tasks = []
    for scheme, h, seed in spec.points():
        prob = ProblemSpec(spec.problem, spec.dim, seed, spec.alpha)
        tasks.append((scheme, prob, h, spec.t_final, spec.metric))
    return _execute(tasks, jobs)


@dataclass
class EnsembleSummary:
    scheme: str
    problem: str
    h_requested: float
    h_actual: float
    force_evals: int
    runs: int
    mean_error: float

    def csv_row(self) -> str:
        return ",".join(
            [
                self.scheme,
                self.problem,
                repr(self.h_requested),
                repr(self.h_actual),
                str(self.force_evals),
                str(self.runs),
                repr(self.mean_error),
            ]
        )


SUMMARY_HEADER = "scheme,problem,h_requested,h_actual,force_evals,runs,mean_error"


def summarize(results: Sequence[ExperimentResult]) -> list[EnsembleSummary]:
    """Group rows by (scheme, h) and average log10 of the per-run errors."""
    groups: dict = {}
    for r in results:
        groups.setdefault((r.scheme, r.problem, r.h_requested), []).append(r)
    out = []
    for (scheme, problem, h), rows in sorted(groups.items()):
        if any(r.diverged for r in rows):
            value = math.inf
        elif rows[0].metric == "mean_log10_energy_error":
            value = math.fsum(r.value for r in rows) / len(rows)
        else:
            value = math.fsum(math.log10(r.value) for r in rows) / len(rows)
        out.append(EnsembleSummary(scheme, problem, h, rows[0].h_actual, rows[0].force_evals, len(rows), value))
    return out


def alpha_grid(start: float, stop: float, count: int) -> list[float]:
    if count < 1:
        raise SpecError("alpha grid needs at least one point")
    if count == 1:
        return [start]
    return [round(start + (stop - start) * i / (count - 1), 12) for i in range(count)]


def run_alpha_sweep(
    schemes: Sequence[SplittingScheme],
    alphas: Sequence[float],
    t_final: float = 1000.0,
    cost_rate: float = DEFAULT_COST_RATE,
    jobs: int = 1,
) -> list[ExperimentResult]:
    """Hénon–Heiles from ``hh_initial(alpha)`` with ``h = stages / cost_rate`` for every scheme."""
    if not alphas:
        raise SpecError("alpha grid is empty")
    if any(not 0 < a <= 1.2 for a in alphas):
        raise SpecError("alpha values must lie in (0, 1.2]")
    if not schemes:
        raise SpecError("no schemes given")
    tasks = []
    for scheme in schemes:
        for a in alphas:
            prob = ProblemSpec("henon_heiles", None, 0, float(a))
            tasks.append((scheme, prob, scheme.stages / cost_rate, t_final, "max_rel_energy_error"))
    return _execute(tasks, jobs)


SWEEP_HEADER = "scheme,problem,alpha,seed,h_requested,h_actual,steps,force_evals,metric,value,wall_time_s"
SWEEP_METADATA = {
    "alpha_thresholds": {"integrable_below": HH_INTEGRABLE_ALPHA, "chaotic_above": HH_CHAOTIC_ALPHA},
    "energy_thresholds": {"integrable_below": 1 / 12, "chaotic_above": 1 / 6},
}


@dataclass
class LongRunReport:
    scheme: str
    h: float
    steps: int
    force_evals: int
    t_final: float
    max_rel_energy_error: float
    drift_statistic: float
    decades: list[tuple[float, float, float]]  # (decade end, max in decade, running max)


LONGRUN_HEADER = "scheme,decade_end,max_rel_energy_error_in_decade,running_max_rel_energy_error"


def run_longrun(
    scheme: SplittingScheme,
    problem: ProblemSpec | None = None,
    t_final: float = 1e5,
    cost_rate: float = DEFAULT_COST_RATE,
    h: float | None = None,
) -> LongRunReport:
    """Long integration logging the energy error per decade of time.

    The drift statistic is max error over the second half divided by the max
    over the first half.
    """
    if not t_final >= 1e4:
        raise SpecError("long runs need t_final >= 1e4")
    problem = problem or ProblemSpec("henon_heiles", alpha=0.5)
    system, x0 = problem.build()
    h = scheme.stages / cost_rate if h is None else h
    traj = integrate(scheme, system, x0, h, t_final, store_states=False)
    rel = np.abs(traj.rel_energy_error)
    t = traj.times - traj.times[0]
    half = t_final / 2
    first = float(np.max(rel[t <= half]))
    second = float(np.max(rel[t > half]))
    drift = second / first if first > 0 else (math.inf if second > 0 else 1.0)

    decades = []
    lo = 0.0
    end = 1.0
    while True:
        end = min(end, t_final)
        window = rel[(t > lo) & (t <= end)]
        in_decade = float(np.max(window)) if window.size else math.nan
        running = float(np.max(rel[t <= end]))
        decades.append((end, in_decade, running))
        if end >= t_final:
            break
        lo, end = end, end * 10
    return LongRunReport(
        scheme.name,
        traj.h,
        traj.counter.steps,
        traj.counter.force_evals,
        t_final,
        float(np.max(rel)),
        drift,
        decades,
    )
