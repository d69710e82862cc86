"""Concrete optimization problems behind one uniform interface.

Two families: the N-segment stepped cantilever column with circular
sections (closed-form physics, the verification workhorse) and
config-driven steel frames (finite-element analysis with catalog
sections).  Index-coded variables are searched as continuous values and
rounded to the nearest catalog index only at evaluation time.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import fea
from .config import build_frame, load_frame_config
from .evaluate import Evaluation, constraint_values
from .fx import FunctioningRule, alpha_bounds_for, expand_continuous, expand_discrete, \
    reduced_dimension, validate_rules
from .sections import SectionPool, interpolated_properties

__all__ = [
    "Domain",
    "Problem",
    "Probe",
    "SteppedColumnSpec",
    "stepped_column_problem",
    "frame_problem",
    "attach_fx",
    "sphere_problem",
]


@dataclass(frozen=True)
class Domain:
    """One decision variable: a continuous interval or a catalog index range."""

    kind: str                      # "continuous" | "index"
    lower: float
    upper: float
    pool: SectionPool | None = None
    label: str = ""

    def __post_init__(self):
        if self.kind not in ("continuous", "index"):
            raise ValueError(f"unknown domain kind {self.kind!r}")
        if self.upper < self.lower:
            raise ValueError(f"empty domain [{self.lower}, {self.upper}]")
        if self.kind == "index" and self.pool is None:
            raise ValueError("index domains need a pool")


@dataclass(frozen=True)
class Probe:
    """Penalized continuous relaxation used by interaction analysis."""

    f: object            # callable(np.ndarray) -> float
    lower: np.ndarray
    upper: np.ndarray


@dataclass
class Problem:
    name: str
    domains: tuple
    n_constraints: int
    evaluate: object              # callable(np.ndarray) -> Evaluation
    decode: object                # callable(np.ndarray) -> dict
    rules: tuple = ()             # declared functioning rules (may be unused)
    probe: Probe | None = None
    frame: object = None          # FrameContext for frame problems
    base_problem: "Problem | None" = None
    expand_full: object = None    # reduced -> full raw vector (reduced problems)

    @property
    def dimension(self) -> int:
        return len(self.domains)

    @property
    def lower(self) -> np.ndarray:
        return np.array([d.lower for d in self.domains])

    @property
    def upper(self) -> np.ndarray:
        return np.array([d.upper for d in self.domains])

    @property
    def is_reduced(self) -> bool:
        return self.base_problem is not None


@dataclass(frozen=True)
class FrameContext:
    model: fea.FrameModel
    pools: tuple
    constraint_set: object
    config: dict
    strategy_defaults: dict


@dataclass(frozen=True)
class SteppedColumnSpec:
    """Stepped cantilever: N stacked circular segments, lateral tip load,
    bending-stress limit at the bottom of every segment."""

    segment_count: int = 50
    segment_length: float = 10.0      # cm
    tip_load: float = 10.0            # kN
    density: float = 0.00785          # kg/cm^3
    allowable_stress: float = 16.0    # kN/cm^2
    radius_min: float = 3.0           # cm
    radius_max: float = 50.0          # cm

    def __post_init__(self):
        if self.segment_count < 1:
            raise ValueError("segment_count must be >= 1")
        for f in ("segment_length", "tip_load", "density", "allowable_stress"):
            if getattr(self, f) <= 0:
                raise ValueError(f"{f} must be positive")
        if not 0 < self.radius_min < self.radius_max:
            raise ValueError("need 0 < radius_min < radius_max")

    @property
    def heights(self) -> np.ndarray:
        """Height of each segment's bottom above the base: (i-1) * L."""
        return np.arange(self.segment_count) * self.segment_length

    @property
    def moments(self) -> np.ndarray:
        """Bending moment at each segment's bottom: P * L * (N - i + 1)."""
        n = self.segment_count
        return self.tip_load * self.segment_length * np.arange(n, 0, -1)


def stepped_column_rule(spec: SteppedColumnSpec) -> FunctioningRule:
    return FunctioningRule(
        replaced_variable_ids=tuple(range(spec.segment_count)),
        heights=tuple(spec.heights),
    )


def stepped_column_problem(spec: SteppedColumnSpec | None = None) -> Problem:
    spec = spec or SteppedColumnSpec()
    n = spec.segment_count
    moments = spec.moments
    rho_l_pi = spec.density * spec.segment_length * math.pi

    def evaluate(x) -> Evaluation:
        r = np.asarray(x, dtype=float)
        weight = rho_l_pi * float(np.dot(r, r))
        sigma = 4.0 * moments / (math.pi * r**3)
        return Evaluation(objective=weight, violations=sigma - spec.allowable_stress)

    def decode(x):
        return {"radii_cm": [float(v) for v in np.asarray(x, dtype=float)]}

    domains = tuple(
        Domain("continuous", spec.radius_min, spec.radius_max, label=f"r{i + 1}")
        for i in range(n)
    )
    rules = (stepped_column_rule(spec),) if n >= 2 else ()
    return Problem(
        name=f"stepped-column-{n}",
        domains=domains,
        n_constraints=n,
        evaluate=evaluate,
        decode=decode,
        rules=rules,
        probe=_stepped_column_probe(spec),
    )


def _stepped_column_probe(spec: SteppedColumnSpec) -> Probe:
    """Weight-plus-penalty relaxation for interaction analysis.

    The penalty stress includes the axial term from the self-weight carried
    by each segment (everything at and above it), which is what couples
    every radius to the ones below it; the lateral-load bending term alone
    is additive across segments and would hide the structure.
    """
    moments = spec.moments
    lo = np.full(spec.segment_count, spec.radius_min)
    hi = np.full(spec.segment_count, spec.radius_max)
    rho_l_pi = spec.density * spec.segment_length * math.pi
    # fixed penalty scale: worst-case weight, so the probe is stateless
    penalty_scale = rho_l_pi * spec.segment_count * spec.radius_max**2

    def f(x):
        r = np.asarray(x, dtype=float)
        area = math.pi * r**2
        weight = rho_l_pi * float(np.dot(r, r))
        carried = np.cumsum((spec.density * spec.segment_length * area)[::-1])[::-1]
        gravity_kn = carried * 9.81e-3  # kg -> kN
        sigma = gravity_kn / area + 4.0 * moments / (math.pi * r**3)
        overshoot = np.maximum(sigma / spec.allowable_stress - 1.0, 0.0)
        return weight + penalty_scale * float(overshoot.sum())

    return Probe(f=f, lower=lo, upper=hi)


def frame_problem(config_source) -> Problem:
    """Discrete frame design problem from a config file, bundled name or dict."""
    doc = load_frame_config(config_source)
    model, pools, cs, group_rules, defaults = build_frame(doc)

    domains = tuple(
        Domain("index", 0, len(pool) - 1, pool=pool,
               label=doc["groups"][g].get("label", f"g{g}"))
        for g, pool in enumerate(pools)
    )

    probe_n = len(pools)
    n_constraints = _frame_constraint_count(model, cs)

    def assignment_for(indices):
        return tuple(pools[g][int(i)] for g, i in enumerate(indices))

    def evaluate(x) -> Evaluation:
        indices = _round_index_vector(x, domains)
        assignment = assignment_for(indices)
        result = fea.analyze(model, assignment)
        g = constraint_values(model, assignment, result, cs)
        return Evaluation(objective=fea.frame_weight(model, assignment), violations=g)

    def decode(x):
        indices = _round_index_vector(x, domains)
        return {
            "section_indices": [int(i) for i in indices],
            "sections": [pools[g][int(i)].name for g, i in enumerate(indices)],
            "areas_cm2": [pools[g][int(i)].area for g, i in enumerate(indices)],
        }

    largest = tuple(pool[len(pool) - 1] for pool in pools)
    penalty_scale = 2.0 * fea.frame_weight(model, largest)
    probe_lo = np.array([pool.min_area for pool in pools])
    probe_hi = np.array([pool.max_area for pool in pools])

    def probe_f(areas):
        assignment = tuple(interpolated_properties(pools[g], a)
                           for g, a in enumerate(np.asarray(areas, dtype=float)))
        result = fea.analyze(model, assignment)
        g = constraint_values(model, assignment, result, cs)
        w = fea.frame_weight(model, assignment)
        return w + penalty_scale * float(np.maximum(g, 0.0).sum())

    context = FrameContext(model=model, pools=tuple(pools), constraint_set=cs,
                           config=doc, strategy_defaults=defaults)
    return Problem(
        name=doc["name"],
        domains=domains,
        n_constraints=n_constraints,
        evaluate=evaluate,
        decode=decode,
        rules=group_rules,
        probe=Probe(f=probe_f, lower=probe_lo, upper=probe_hi),
        frame=context,
    )


def _round_index_vector(x, domains):
    x = np.asarray(x, dtype=float)
    return [min(max(round(float(v)), int(d.lower)), int(d.upper))
            for v, d in zip(x, domains)]


def _frame_constraint_count(model, cs):
    n = 0
    if "stress" in cs.families:
        n += len(model.members)
    if "lateral_drift" in cs.families:
        n += 1
    if "interstory_drift" in cs.families:
        n += len(model.story_levels)
    if "lrfd_interaction" in cs.families:
        n += len(model.members)
    return n


def attach_fx(problem: Problem, rules=None) -> Problem:
    """Reduced-space view: functioned variables replaced by (base, alpha).

    The reduced evaluation expands to a full vector (clamped into the
    original box for continuous variables, capped onto the catalog for index
    variables) and delegates to the full problem, so one reduced evaluation
    charges exactly one FE.
    """
    if problem.is_reduced:
        raise ValueError("problem is already reduced")
    rules = tuple(rules if rules is not None else problem.rules)
    if not rules:
        raise ValueError(f"{problem.name}: no functioning rules declared")
    n = problem.dimension
    validate_rules(rules, n)

    functioned = sorted(i for r in rules for i in r.replaced_variable_ids)
    untouched = [i for i in range(n) if i not in set(functioned)]

    reduced_domains = []
    rule_info = []
    for rule in rules:
        ids = rule.replaced_variable_ids
        base_dom = problem.domains[ids[0]]
        for i in ids[1:]:
            d = problem.domains[i]
            if d.kind != base_dom.kind or d.pool is not base_dom.pool \
                    or (d.kind == "continuous"
                        and (d.lower, d.upper) != (base_dom.lower, base_dom.upper)):
                raise ValueError(
                    f"functioned variables {ids} must share one domain; "
                    f"variable {i} differs"
                )
        if base_dom.kind == "index":
            bounds = alpha_bounds_for(rule, base_dom.pool.min_area,
                                      base_dom.pool.max_area)
        else:
            bounds = alpha_bounds_for(rule, base_dom.lower, base_dom.upper)
        k = len(reduced_domains)
        reduced_domains.append(Domain(base_dom.kind, base_dom.lower, base_dom.upper,
                                      pool=base_dom.pool,
                                      label=f"{base_dom.label or 'base'}"))
        reduced_domains.append(Domain("continuous", bounds.lower, bounds.upper,
                                      label="alpha"))
        rule_info.append((rule, base_dom, k))
    for i in untouched:
        reduced_domains.append(problem.domains[i])
    reduced_domains = tuple(reduced_domains)
    n_params = 2 * len(rules)

    assert len(reduced_domains) == reduced_dimension(rules, n)

    def expand(xr):
        xr = np.asarray(xr, dtype=float)
        full = np.empty(n)
        for rule, base_dom, k in rule_info:
            base_raw, alpha = float(xr[k]), float(xr[k + 1])
            alpha = max(alpha, 1.0)
            heights = np.asarray(rule.heights)
            if base_dom.kind == "index":
                base_index = min(max(round(base_raw), int(base_dom.lower)),
                                 int(base_dom.upper))
                idx = expand_discrete(base_index, alpha, heights, base_dom.pool)
                full[list(rule.replaced_variable_ids)] = idx
            else:
                base_value = min(max(base_raw, base_dom.lower), base_dom.upper)
                values = expand_continuous(base_value, alpha, heights)
                full[list(rule.replaced_variable_ids)] = np.clip(
                    values, base_dom.lower, base_dom.upper)
        for slot, i in enumerate(untouched):
            full[i] = xr[n_params + slot]
        return full

    def evaluate(xr) -> Evaluation:
        return problem.evaluate(expand(xr))

    def decode(xr):
        xr = np.asarray(xr, dtype=float)
        reduced = {}
        for ri, (rule, base_dom, k) in enumerate(rule_info):
            reduced[f"rule{ri}"] = {"base": float(xr[k]), "alpha": float(xr[k + 1])}
        out = problem.decode(expand(xr))
        out["reduced"] = reduced
        return out

    return Problem(
        name=problem.name,
        domains=reduced_domains,
        n_constraints=problem.n_constraints,
        evaluate=evaluate,
        decode=decode,
        rules=rules,
        probe=problem.probe,
        frame=problem.frame,
        base_problem=problem,
        expand_full=expand,
    )


def sphere_problem(dimension=5, lower=-5.0, upper=5.0) -> Problem:
    """Unconstrained sphere test function (smoke tests for the optimizers)."""

    def evaluate(x):
        x = np.asarray(x, dtype=float)
        return Evaluation(objective=float(np.dot(x, x)), violations=np.zeros(0))

    lo = np.full(dimension, lower)
    hi = np.full(dimension, upper)
    return Problem(
        name=f"sphere-{dimension}",
        domains=tuple(Domain("continuous", lower, upper, label=f"x{i}")
                      for i in range(dimension)),
        n_constraints=0,
        evaluate=evaluate,
        decode=lambda x: {"x": [float(v) for v in np.asarray(x, dtype=float)]},
        probe=Probe(f=lambda x: float(np.dot(x, x)), lower=lo, upper=hi),
    )
