"""Population metaheuristics: global-best PSO and DE/rand/1/bin.

Both optimizers treat every variable as continuous; index-coded variables
are rounded inside the problem's evaluation only.  Selection and best
tracking use the feasibility rules (deb_compare); the penalized scalar
fitness is only a reporting view.  Boundary handling follows the usual
scheme for each algorithm: DE clamps an out-of-bounds trial component back
to the violated bound, PSO clamps the position and reverses that velocity
component so the particle does not immediately leave again.

Runs are deterministic: one seed feeds two independent substreams, one for
initialization and one for the search loop, so strategies that differ only
in how they initialize share the exact search stream afterwards.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .evaluate import Evaluation, GMaxTracker, deb_compare
from .problems import Problem, attach_fx

__all__ = [
    "OptimizerConfig",
    "Population",
    "RunRecord",
    "initialize_population",
    "pso_run",
    "de_run",
    "run_optimizer",
    "reflect_at_bounds",
]

STRATEGIES = ("none", "ifx", "fx")


@dataclass(frozen=True)
class OptimizerConfig:
    algorithm: str             # "pso" | "de"
    population_size: int
    max_fe: int
    rng_seed: int = 0
    # PSO coefficients (constriction-equivalent defaults)
    inertia: float = 0.7298
    cognitive: float = 1.49618
    social: float = 1.49618
    v_max_fraction: float = 0.5
    # DE coefficients
    scale_f: float = 0.5
    crossover_cr: float = 0.9
    variant: str = "rand/1/bin"

    def __post_init__(self):
        if self.algorithm not in ("pso", "de"):
            raise ValueError(f"unknown algorithm {self.algorithm!r}")
        if self.population_size < 4:
            raise ValueError("population_size must be >= 4 (DE mutation needs "
                             "three donors plus the target)")
        if self.max_fe < self.population_size:
            raise ValueError("max_fe must cover at least the initial population")
        if self.variant != "rand/1/bin":
            raise ValueError(f"unsupported DE variant {self.variant!r}")


@dataclass
class Population:
    positions: np.ndarray
    evaluations: list = field(default_factory=list)
    velocities: np.ndarray | None = None
    fe_used: int = 0


@dataclass
class RunRecord:
    """Everything one trial produced: histories plus the final best design."""

    strategy: str
    algorithm: str
    seed: int
    population_size: int
    max_fe: int
    fe_used: int
    best_history: list                 # best feasible objective per generation (None before first feasible)
    infeasible_fraction_history: list  # fraction of current population infeasible
    final_vector: list                 # full-space raw design vector
    final_reduced_vector: list | None  # reduced vector when run in reduced space
    final_decoded: dict
    final_objective: float
    final_violations: list
    final_feasible: bool
    final_normalized_violation: float
    problem_name: str
    failed: bool = False
    error: str | None = None


def _rng_streams(seed):
    init_ss, search_ss = np.random.SeedSequence(seed).spawn(2)
    return np.random.default_rng(init_ss), np.random.default_rng(search_ss)


def _uniform(rng, lower, upper, size):
    return lower + rng.random((size, lower.size)) * (upper - lower)


def initialize_population(problem: Problem, config: OptimizerConfig,
                          strategy="none", rules=None, rng=None) -> Population:
    """Build initial positions for the given strategy.

    none: uniform over the problem's own domains.
    ifx:  sample the reduced space uniformly, expand to full-space points,
          then search in full space.
    fx:   the problem itself must already be reduced; sampling is uniform
          over the reduced domains.
    """
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}")
    rng = rng if rng is not None else _rng_streams(config.rng_seed)[0]
    pop = config.population_size

    if strategy == "none":
        if problem.is_reduced:
            raise ValueError("strategy 'none' expects the full-space problem")
        positions = _uniform(rng, problem.lower, problem.upper, pop)
    elif strategy == "fx":
        if not problem.is_reduced:
            raise ValueError("strategy 'fx' needs a reduced problem "
                             "(attach functioning rules first)")
        positions = _uniform(rng, problem.lower, problem.upper, pop)
    else:  # ifx
        if problem.is_reduced:
            raise ValueError("strategy 'ifx' expects the full-space problem")
        reduced = attach_fx(problem, rules)
        samples = _uniform(rng, reduced.lower, reduced.upper, pop)
        positions = np.array([reduced.expand_full(s) for s in samples])
    return Population(positions=positions)


def reflect_at_bounds(positions, velocities, lower, upper):
    """Clamp positions into the box and reverse the velocity of every
    component that crossed a bound.  Returns new (positions, velocities)."""
    positions = np.array(positions, dtype=float)
    velocities = np.array(velocities, dtype=float)
    crossed = (positions < lower) | (positions > upper)
    positions = np.clip(positions, lower, upper)
    velocities[crossed] = -velocities[crossed]
    return positions, velocities


class _RunState:
    """Budget, violation normalization and history bookkeeping for one run."""

    def __init__(self, problem, config, strategy, observers):
        self.problem = problem
        self.config = config
        self.strategy = strategy
        self.observers = tuple(observers)
        self.tracker = GMaxTracker()
        self.fe_used = 0
        self.best_history = []
        self.infeasible_history = []
        self.best_feasible_obj = None
        self.best_feasible_vec = None
        self.best_feasible_eval = None

    def evaluate(self, x) -> Evaluation:
        ev = self.problem.evaluate(x)
        self.fe_used += 1
        ev.normalized_violation = self.tracker.normalize(ev.violations)
        if ev.feasible and (self.best_feasible_obj is None
                            or ev.objective < self.best_feasible_obj):
            self.best_feasible_obj = ev.objective
            self.best_feasible_vec = np.array(x, dtype=float)
            self.best_feasible_eval = ev
        return ev

    def remaining(self) -> int:
        return self.config.max_fe - self.fe_used

    def merge_and_refresh(self, new_evals, *groups):
        """Fold this generation's violations into the running maxima, then
        re-normalize every live evaluation against the merged state so all
        comparisons inside the generation share one consistent scale."""
        self.tracker.merge([ev.violations for ev in new_evals])
        for ev in itertools.chain(*groups):
            ev.normalized_violation = self.tracker.normalize(ev.violations)

    def record_history(self, population_evals):
        frac = float(np.mean([not ev.feasible for ev in population_evals]))
        self.best_history.append(self.best_feasible_obj)
        self.infeasible_history.append(frac)
        gen = len(self.best_history) - 1
        for obs in self.observers:
            obs(gen, self.fe_used, self.best_feasible_obj, frac)

    def make_record(self, fallback_vec, fallback_eval) -> RunRecord:
        if self.best_feasible_eval is not None:
            vec, ev = self.best_feasible_vec, self.best_feasible_eval
        else:
            vec, ev = np.array(fallback_vec, dtype=float), fallback_eval
        problem = self.problem
        if problem.is_reduced:
            full_vec = problem.expand_full(vec)
            reduced_vec = [float(v) for v in vec]
        else:
            full_vec = vec
            reduced_vec = None
        return RunRecord(
            strategy=self.strategy,
            algorithm=self.config.algorithm,
            seed=self.config.rng_seed,
            population_size=self.config.population_size,
            max_fe=self.config.max_fe,
            fe_used=self.fe_used,
            best_history=list(self.best_history),
            infeasible_fraction_history=list(self.infeasible_history),
            final_vector=[float(v) for v in np.asarray(full_vec, dtype=float)],
            final_reduced_vector=reduced_vec,
            final_decoded=problem.decode(vec),
            final_objective=float(ev.objective),
            final_violations=[float(g) for g in ev.violations],
            final_feasible=bool(ev.feasible),
            final_normalized_violation=float(ev.normalized_violation),
            problem_name=problem.name,
        )


def pso_run(problem: Problem, config: OptimizerConfig, observers=(),
            strategy="none", rules=None) -> RunRecord:
    """Global-best particle swarm with feasibility-rule best updates."""
    init_rng, rng = _rng_streams(config.rng_seed)
    state = _RunState(problem, config, strategy, observers)
    X = initialize_population(problem, config, strategy, rules, rng=init_rng).positions
    pop, n = X.shape
    lower, upper = problem.lower, problem.upper
    v_max = config.v_max_fraction * (upper - lower)
    V = np.zeros_like(X)

    evals = [state.evaluate(x) for x in X]
    state.merge_and_refresh(evals, evals)
    state.record_history(evals)

    pbest_X = X.copy()
    pbest_ev = list(evals)
    g_idx = _deb_argbest(evals)
    gbest_x, gbest_ev = X[g_idx].copy(), evals[g_idx]

    while state.remaining() > 0:
        m = min(pop, state.remaining())
        r1 = rng.random((pop, n))
        r2 = rng.random((pop, n))
        V = (config.inertia * V
             + config.cognitive * r1 * (pbest_X - X)
             + config.social * r2 * (gbest_x - X))
        np.clip(V, -v_max, v_max, out=V)
        X_new, V = reflect_at_bounds(X + V, V, lower, upper)
        # with a partial budget only the first m particles move this generation
        X[:m] = X_new[:m]
        for i in range(m):
            evals[i] = state.evaluate(X[i])
        state.merge_and_refresh(evals[:m], evals, pbest_ev, [gbest_ev])
        state.record_history(evals)

        for i in range(m):
            if deb_compare(pbest_ev[i], evals[i]) > 0:
                pbest_ev[i] = evals[i]
                pbest_X[i] = X[i]
            if deb_compare(gbest_ev, pbest_ev[i]) > 0:
                gbest_ev = pbest_ev[i]
                gbest_x = pbest_X[i].copy()

    return state.make_record(gbest_x, gbest_ev)


def de_run(problem: Problem, config: OptimizerConfig, observers=(),
           strategy="none", rules=None) -> RunRecord:
    """DE/rand/1/bin with greedy feasibility-rule selection.

    A trial replaces its target only when strictly better under the
    feasibility rules, so a feasible member is never lost and the infeasible
    fraction cannot increase between generations.
    """
    init_rng, rng = _rng_streams(config.rng_seed)
    state = _RunState(problem, config, strategy, observers)
    X = initialize_population(problem, config, strategy, rules, rng=init_rng).positions
    pop, n = X.shape
    lower, upper = problem.lower, problem.upper

    evals = [state.evaluate(x) for x in X]
    state.merge_and_refresh(evals, evals)
    state.record_history(evals)

    while state.remaining() > 0:
        m = min(pop, state.remaining())
        draw = rng.random((m, pop))
        draw[np.arange(m), np.arange(m)] = 2.0  # never draw the target itself
        donors = np.argsort(draw, axis=1)[:, :3]
        j_rand = rng.integers(0, n, size=m)
        cross = rng.random((m, n)) < config.crossover_cr
        cross[np.arange(m), j_rand] = True

        mutants = X[donors[:, 0]] + config.scale_f * (X[donors[:, 1]] - X[donors[:, 2]])
        np.clip(mutants, lower, upper, out=mutants)  # return to the violated bound
        trials = np.where(cross, mutants, X[:m])

        trial_evals = [state.evaluate(t) for t in trials]
        state.merge_and_refresh(trial_evals, evals, trial_evals)
        for i in range(m):
            if deb_compare(evals[i], trial_evals[i]) > 0:
                evals[i] = trial_evals[i]
                X[i] = trials[i]
        state.record_history(evals)

    b_idx = _deb_argbest(evals)
    return state.make_record(X[b_idx], evals[b_idx])


def _deb_argbest(evals) -> int:
    best = 0
    for i in range(1, len(evals)):
        if deb_compare(evals[best], evals[i]) > 0:
            best = i
    return best


def run_optimizer(problem, config, observers=(), strategy="none", rules=None) -> RunRecord:
    fn = pso_run if config.algorithm == "pso" else de_run
    return fn(problem, config, observers=observers, strategy=strategy, rules=rules)
