"""Experiment protocol: strategies x algorithms x seeded trials, persisted
incrementally so interrupted plans resume without recomputation.

Results layout under <out>/<plan-name>/:
    plan.json                   manifest (problem spec + cell settings)
    <algo>-<strategy>/<seed>.json   one RunRecord per trial
    summary.csv                 per-cell statistics
    histories/<cell>.csv        mean convergence / infeasible-fraction curves

Seeds are seed_base + trial index, shared across cells so strategy
comparisons are paired, and disjoint within a cell.
"""

from __future__ import annotations

import dataclasses
import json
import os
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .optim import OptimizerConfig, RunRecord, run_optimizer
from .problems import Problem, SteppedColumnSpec, attach_fx, frame_problem, \
    sphere_problem, stepped_column_problem

__all__ = [
    "ExperimentPlan",
    "CellSummary",
    "PlanMismatchError",
    "build_problem",
    "default_cell_settings",
    "run_plan",
    "improvement_vs_none",
    "mean_history",
    "practicality_report",
    "load_records",
]

STRATEGIES = ("none", "ifx", "fx")
ALGORITHMS = ("pso", "de")

FALLBACK_POPULATION = {"none": 25, "ifx": 25, "fx": 20}
FALLBACK_MAX_FE = {"none": 5000, "ifx": 5000, "fx": 3000}


class PlanMismatchError(ValueError):
    """An existing results directory was produced by a different plan."""


def build_problem(spec: dict) -> Problem:
    """Reconstruct a problem from its serializable spec (worker-safe)."""
    kind = spec.get("kind")
    if kind == "stepped-column":
        fields = {f.name for f in dataclasses.fields(SteppedColumnSpec)}
        kwargs = {k: v for k, v in spec.items() if k in fields}
        return stepped_column_problem(SteppedColumnSpec(**kwargs))
    if kind == "frame":
        return frame_problem(spec["config"])
    if kind == "sphere":
        return sphere_problem(dimension=spec.get("dimension", 5))
    raise ValueError(f"unknown problem kind {kind!r}")


def default_cell_settings(problem: Problem):
    """Per-strategy population sizes and FE budgets for a problem."""
    population = dict(FALLBACK_POPULATION)
    max_fe = dict(FALLBACK_MAX_FE)
    if problem.frame is not None:
        population.update(problem.frame.strategy_defaults.get("population", {}))
        max_fe.update(problem.frame.strategy_defaults.get("max_fe", {}))
    return population, max_fe


@dataclass(frozen=True)
class ExperimentPlan:
    name: str
    problem_spec: dict
    strategies: tuple = STRATEGIES
    algorithms: tuple = ALGORITHMS
    trials: int = 51
    seed_base: int = 0
    population: dict = field(default_factory=lambda: dict(FALLBACK_POPULATION))
    max_fe: dict = field(default_factory=lambda: dict(FALLBACK_MAX_FE))

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        for s in self.strategies:
            if s not in STRATEGIES:
                raise ValueError(f"unknown strategy {s!r}")
            if self.population.get(s, 0) <= 0 or self.max_fe.get(s, 0) <= 0:
                raise ValueError(f"strategy {s!r} needs positive population and budget")
        for a in self.algorithms:
            if a not in ALGORITHMS:
                raise ValueError(f"unknown algorithm {a!r}")

    def cells(self):
        return [(a, s) for a in self.algorithms for s in self.strategies]

    def seeds(self):
        return [self.seed_base + t for t in range(self.trials)]

    def to_manifest(self) -> dict:
        return {
            "format": 1,
            "name": self.name,
            "problem": self.problem_spec,
            "strategies": list(self.strategies),
            "algorithms": list(self.algorithms),
            "trials": self.trials,
            "seed_base": self.seed_base,
            "population": dict(self.population),
            "max_fe": dict(self.max_fe),
        }

    @staticmethod
    def from_manifest(doc) -> "ExperimentPlan":
        return ExperimentPlan(
            name=doc["name"],
            problem_spec=doc["problem"],
            strategies=tuple(doc["strategies"]),
            algorithms=tuple(doc["algorithms"]),
            trials=doc["trials"],
            seed_base=doc["seed_base"],
            population=dict(doc["population"]),
            max_fe=dict(doc["max_fe"]),
        )


@dataclass
class CellSummary:
    algorithm: str
    strategy: str
    trials: int
    completed: int
    failed: int
    population: int
    max_fe: int
    median: float
    mean: float
    best: float
    worst: float
    improvement_vs_none_pct: float | None = None


def cell_name(algorithm, strategy) -> str:
    return f"{algorithm}-{strategy}"


def _record_to_doc(record: RunRecord) -> dict:
    return dataclasses.asdict(record)


def _record_from_doc(doc) -> RunRecord:
    return RunRecord(**doc)


def _atomic_write_json(path: Path, doc):
    tmp = path.with_suffix(path.suffix + ".tmp")
    with open(tmp, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, sort_keys=True, indent=1, allow_nan=False)
        fh.write("\n")
    os.replace(tmp, path)


def _atomic_write_text(path: Path, text):
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, path)


def run_trial(problem_spec, algorithm, strategy, seed, population, max_fe) -> RunRecord:
    """Execute one trial (also the process-pool entry point)."""
    problem = build_problem(problem_spec)
    if strategy == "fx":
        problem = attach_fx(problem)
    config = OptimizerConfig(algorithm=algorithm, population_size=population,
                             max_fe=max_fe, rng_seed=seed)
    try:
        return run_optimizer(problem, config, strategy=strategy)
    except Exception as exc:  # aborted trial: recorded as failed, plan continues
        return RunRecord(
            strategy=strategy, algorithm=algorithm, seed=seed,
            population_size=population, max_fe=max_fe, fe_used=0,
            best_history=[], infeasible_fraction_history=[],
            final_vector=[], final_reduced_vector=None, final_decoded={},
            final_objective=None, final_violations=[],
            final_feasible=False, final_normalized_violation=None,
            problem_name=problem.name, failed=True, error=repr(exc),
        )


def _trial_worker(args):
    plan_doc, algorithm, strategy, seed, out = args
    plan = ExperimentPlan.from_manifest(plan_doc)
    record = run_trial(plan.problem_spec, algorithm, strategy, seed,
                       plan.population[strategy], plan.max_fe[strategy])
    path = Path(out) / cell_name(algorithm, strategy) / f"{seed}.json"
    _atomic_write_json(path, _record_to_doc(record))
    return str(path)


def run_plan(plan: ExperimentPlan, out_root, jobs=1, echo=None):
    """Execute every missing (cell, seed) trial, then refresh the summaries.

    Returns (records, summaries, new_trial_count); ``records`` maps cell
    name to a seed-ordered list of RunRecords.
    """
    echo = echo or (lambda *_: None)
    plan_dir = Path(out_root) / plan.name
    plan_dir.mkdir(parents=True, exist_ok=True)
    manifest_path = plan_dir / "plan.json"
    manifest = plan.to_manifest()
    if manifest_path.exists():
        existing = json.loads(manifest_path.read_text(encoding="utf-8"))
        if existing != manifest:
            raise PlanMismatchError(
                f"{manifest_path} holds a different plan; use a new --plan-name "
                f"or output directory"
            )
    else:
        _atomic_write_json(manifest_path, manifest)

    pending = []
    for algorithm, strategy in plan.cells():
        cell_dir = plan_dir / cell_name(algorithm, strategy)
        cell_dir.mkdir(exist_ok=True)
        for seed in plan.seeds():
            if not (cell_dir / f"{seed}.json").exists():
                pending.append((manifest, algorithm, strategy, seed, str(plan_dir)))

    if pending:
        echo(f"running {len(pending)} trials (jobs={jobs})")
        if jobs > 1:
            with ProcessPoolExecutor(max_workers=jobs) as pool:
                for i, _ in enumerate(pool.map(_trial_worker, pending), 1):
                    echo(f"  trial {i}/{len(pending)} done")
        else:
            for i, args in enumerate(pending, 1):
                _trial_worker(args)
                echo(f"  trial {i}/{len(pending)} done")

    records = load_records(plan_dir, plan)
    summaries = summarize(plan, records)
    _write_summary_csv(plan_dir / "summary.csv", summaries)
    _write_histories(plan_dir, plan, records)
    return records, summaries, len(pending)


def load_records(plan_dir, plan: ExperimentPlan):
    records = {}
    for algorithm, strategy in plan.cells():
        cell = cell_name(algorithm, strategy)
        cell_records = []
        for seed in plan.seeds():
            path = Path(plan_dir) / cell / f"{seed}.json"
            doc = json.loads(path.read_text(encoding="utf-8"))
            cell_records.append(_record_from_doc(doc))
        records[cell] = cell_records
    return records


def summarize(plan: ExperimentPlan, records) -> list:
    summaries = []
    by_cell = {}
    for algorithm, strategy in plan.cells():
        cell = cell_name(algorithm, strategy)
        recs = records[cell]
        finals = [r.final_objective for r in recs if not r.failed and r.final_feasible]
        failed = sum(r.failed for r in recs)
        stats = (np.median(finals), np.mean(finals), np.min(finals), np.max(finals)) \
            if finals else (float("nan"),) * 4
        summary = CellSummary(
            algorithm=algorithm, strategy=strategy, trials=len(recs),
            completed=len(recs) - failed, failed=failed,
            population=plan.population[strategy], max_fe=plan.max_fe[strategy],
            median=float(stats[0]), mean=float(stats[1]),
            best=float(stats[2]), worst=float(stats[3]),
        )
        summaries.append(summary)
        by_cell[(algorithm, strategy)] = summary
    for summary in summaries:
        none_cell = by_cell.get((summary.algorithm, "none"))
        if none_cell is not None and summary.strategy != "none":
            summary.improvement_vs_none_pct = improvement_vs_none(summary, none_cell)
    return summaries


def improvement_vs_none(summary_cell: CellSummary, summary_none: CellSummary) -> float:
    """Median improvement relative to the unfunctioned run of the same
    algorithm, in percent; negative when the cell is worse."""
    return float(100.0 * (summary_none.median - summary_cell.median)
                 / summary_none.median)


def mean_history(cell_records):
    """Pointwise mean curves over one cell's trials, aligned by FE count.

    Returns (fe, mean_best, mean_infeasible_fraction).  The best-objective
    mean ignores trials that have not yet found a feasible point (None
    entries); a point is NaN only while no trial has one.
    """
    live = [r for r in cell_records if not r.failed]
    if not live:
        raise ValueError("cell has no completed records")
    lengths = {len(r.best_history) for r in live}
    if len(lengths) != 1:
        raise ValueError(f"ragged histories in cell: lengths {sorted(lengths)}")
    length = lengths.pop()
    pop = live[0].population_size
    max_fe = live[0].max_fe
    fe = np.minimum((np.arange(length) + 1) * pop, max_fe)
    best = np.array([[np.nan if b is None else b for b in r.best_history]
                     for r in live])
    infeas = np.array([r.infeasible_fraction_history for r in live])
    with warnings.catch_warnings():
        # all-NaN generations (no trial feasible yet) legitimately average to NaN
        warnings.simplefilter("ignore", category=RuntimeWarning)
        mean_best = np.nanmean(best, axis=0) if length else np.zeros(0)
    return fe, mean_best, infeas.mean(axis=0)


def practicality_report(record: RunRecord, problem: Problem):
    """Per-column-stack monotonicity of a final frame design.

    For each declared stack: whether areas are non-increasing with height,
    the first offending (lower, upper) group pair if not, and the area
    profile normalized by the base area for plotting.
    """
    if problem.frame is None:
        raise ValueError("practicality_report needs a frame problem with "
                         "declared column stacks")
    base = problem.base_problem or problem
    areas = record.final_decoded.get("areas_cm2")
    if areas is None:
        raise ValueError("record does not carry decoded group areas")
    reports = []
    for rule in base.rules:
        stack = [areas[g] for g in rule.replaced_variable_ids]
        violation = None
        for k in range(1, len(stack)):
            if stack[k] > stack[k - 1]:
                violation = (rule.replaced_variable_ids[k - 1],
                             rule.replaced_variable_ids[k])
                break
        reports.append({
            "group_ids": list(rule.replaced_variable_ids),
            "heights_cm": list(rule.heights),
            "areas_cm2": [float(a) for a in stack],
            "normalized": [float(a / stack[0]) for a in stack],
            "monotone": violation is None,
            "violation_pair": violation,
        })
    return reports


def _write_summary_csv(path, summaries):
    lines = ["cell,algorithm,strategy,trials,completed,failed,population,max_fe,"
             "median,mean,best,worst,improvement_vs_none_pct"]
    for s in summaries:
        imp = "" if s.improvement_vs_none_pct is None else repr(s.improvement_vs_none_pct)
        lines.append(
            f"{cell_name(s.algorithm, s.strategy)},{s.algorithm},{s.strategy},"
            f"{s.trials},{s.completed},{s.failed},{s.population},{s.max_fe},"
            f"{s.median!r},{s.mean!r},{s.best!r},{s.worst!r},{imp}"
        )
    _atomic_write_text(Path(path), "\n".join(lines) + "\n")


def _write_histories(plan_dir, plan, records):
    hist_dir = Path(plan_dir) / "histories"
    hist_dir.mkdir(exist_ok=True)
    for algorithm, strategy in plan.cells():
        cell = cell_name(algorithm, strategy)
        try:
            fe, best, infeas = mean_history(records[cell])
        except ValueError:
            continue
        lines = ["fe,best,infeasible_fraction"]
        for k in range(fe.size):
            b = "" if np.isnan(best[k]) else repr(float(best[k]))
            lines.append(f"{int(fe[k])},{b},{float(infeas[k])!r}")
        _atomic_write_text(hist_dir / f"{cell}.csv", "\n".join(lines) + "\n")
