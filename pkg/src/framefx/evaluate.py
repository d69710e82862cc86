"""Constraint evaluation, violation normalization and feasibility-rule ordering.

Convention: a constraint value g <= 0 is satisfied, g > 0 is violated.  The
normalized violation G divides each positive g by the largest violation of
that constraint seen so far in the run, so G is dimensionless and each
constraint contributes at most 1 for the worst point seen.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .fea import AnalysisResult, FrameModel, member_max_stress

__all__ = [
    "PHI_COMPRESSION",
    "PHI_TENSION",
    "PHI_BENDING",
    "COLUMN_ELASTIC_COEF",
    "ConstraintSet",
    "Evaluation",
    "GMaxTracker",
    "constraint_values",
    "constraint_labels",
    "column_critical_stress",
    "lrfd_strengths",
    "lrfd_interaction_value",
    "effective_length_factor_sway",
    "normalized_violation",
    "penalized_fitness",
    "deb_compare",
]

PHI_COMPRESSION = 0.85
PHI_TENSION = 0.90
PHI_BENDING = 0.90

# Elastic-branch coefficient of the column curve.  Design codes round this to
# 0.877; the unrounded value 2.25 * 0.658**2.25 makes the inelastic and
# elastic branches meet exactly at the slenderness seam (lambda_c = 1.5),
# which the branch-continuity checks rely on.
COLUMN_ELASTIC_COEF = 2.25 * 0.658**2.25

VALID_FAMILIES = ("stress", "lateral_drift", "interstory_drift", "lrfd_interaction")


@dataclass(frozen=True)
class ConstraintSet:
    """Which constraint families apply and their limits."""

    families: frozenset
    stress_allowable: float | None = None   # kN/cm^2
    drift_index_R: float | None = None      # dimensionless Delta_T/H limit
    interstory_index_RI: float = 1.0 / 300.0
    roof_drift_limit_abs: float | None = None  # cm; overrides drift_index_R
    k_mode: str = "fixed"                   # "fixed" (per-group K) or "sway"

    def __post_init__(self):
        if not self.families:
            raise ValueError("at least one constraint family must be active")
        unknown = set(self.families) - set(VALID_FAMILIES)
        if unknown:
            raise ValueError(f"unknown constraint families: {sorted(unknown)}")
        if "stress" in self.families and (self.stress_allowable or 0) <= 0:
            raise ValueError("stress family requires a positive stress_allowable")
        if "lateral_drift" in self.families and self.roof_drift_limit_abs is None:
            if (self.drift_index_R or 0) <= 0:
                raise ValueError("lateral_drift family requires drift_index_R > 0 "
                                 "or roof_drift_limit_abs")
        if "interstory_drift" in self.families and self.interstory_index_RI <= 0:
            raise ValueError("interstory_index_RI must be positive")
        if self.k_mode not in ("fixed", "sway"):
            raise ValueError(f"unknown k_mode {self.k_mode!r}")


@dataclass
class Evaluation:
    """One objective-plus-constraints evaluation (one FE charge)."""

    objective: float
    violations: np.ndarray
    normalized_violation: float = field(default=None)  # type: ignore[assignment]
    fe_count_charged: int = 1

    def __post_init__(self):
        self.violations = np.asarray(self.violations, dtype=float)
        if self.normalized_violation is None:
            # stateless default: each violated constraint is its own worst
            # case so far and contributes exactly 1
            self.normalized_violation = float(np.count_nonzero(self.violations > 0))

    @property
    def feasible(self) -> bool:
        return bool((self.violations <= 0).all())


class GMaxTracker:
    """Running per-constraint maximum violation for normalization.

    Candidates inside one generation are all normalized against the same
    snapshot (plus their own violations, so a first-ever violation counts
    as 1); ``merge`` folds a generation's violations into the snapshot once,
    keeping results independent of evaluation order within the generation.
    """

    def __init__(self, n_constraints=None):
        self.gmax = None if n_constraints is None else np.zeros(n_constraints)

    def _ensure(self, n):
        if self.gmax is None:
            self.gmax = np.zeros(n)

    def normalize(self, violations) -> float:
        g = np.asarray(violations, dtype=float)
        self._ensure(g.size)
        pos = np.maximum(g, 0.0)
        denom = np.maximum(self.gmax, pos)
        with np.errstate(invalid="ignore", divide="ignore"):
            ratios = np.where(pos > 0, pos / denom, 0.0)
        return float(ratios.sum())

    def merge(self, violations_batch):
        for g in violations_batch:
            g = np.asarray(g, dtype=float)
            self._ensure(g.size)
            np.maximum(self.gmax, np.maximum(g, 0.0), out=self.gmax)


def normalized_violation(violations, tracker: GMaxTracker) -> float:
    """Normalize one point and immediately fold it into the tracker."""
    value = tracker.normalize(violations)
    tracker.merge([violations])
    return value


def penalized_fitness(objective, normalized_violation_G, f_max_feasible) -> float:
    """Deb-style scalar fitness: feasible points keep their objective,
    infeasible points rank after the worst feasible one by their violation.

    With no feasible member in the population pass ``f_max_feasible = 0`` so
    ranking degenerates to the violation comparison.
    """
    if normalized_violation_G <= 0:
        return float(objective)
    return float(f_max_feasible) + float(normalized_violation_G)


def deb_compare(a: Evaluation, b: Evaluation) -> int:
    """Feasibility-rule ordering: -1 if a ranks better, 1 if b does, 0 on ties.

    Feasible solutions compare by objective, a feasible solution beats any
    infeasible one, and infeasible solutions compare by normalized violation.
    Callers keep the incumbent (first argument) on ties.
    """
    key_a = (0, a.objective) if a.feasible else (1, a.normalized_violation)
    key_b = (0, b.objective) if b.feasible else (1, b.normalized_violation)
    if key_a < key_b:
        return -1
    if key_a > key_b:
        return 1
    return 0


def column_critical_stress(lambda_c: float, fy: float) -> float:
    """Column-curve critical stress: inelastic branch up to lambda_c = 1.5,
    elastic beyond; the branches meet exactly at the seam."""
    if lambda_c <= 1.5:
        return 0.658 ** (lambda_c**2) * fy
    return COLUMN_ELASTIC_COEF / lambda_c**2 * fy


def lrfd_strengths(shape, length, k_factor, elastic_modulus, yield_stress):
    """Nominal compressive strength P_n (kN) and flexural strength M_n (kN*cm).

    Compression uses the column curve on the weak-axis slenderness; flexure
    assumes a compact, laterally braced section (M_n = Z_x * Fy).
    """
    if min(length, k_factor, elastic_modulus, yield_stress) <= 0:
        raise ValueError("length, k_factor, E and Fy must all be positive")
    lambda_c = (k_factor * length) / (shape.min_radius_of_gyration * math.pi) \
        * math.sqrt(yield_stress / elastic_modulus)
    p_n = shape.area * column_critical_stress(lambda_c, yield_stress)
    m_n = shape.plastic_modulus_x * yield_stress
    return p_n, m_n


def lrfd_interaction_value(axial_ratio: float, moment_ratio: float) -> float:
    """Beam-column interaction value minus 1 (g <= 0 satisfied).

    ``axial_ratio`` is Pu / (phi_c * P_n), ``moment_ratio`` is
    Mu / (phi_b * M_n); the low-axial branch halves the axial term.
    """
    if axial_ratio < 0.2:
        return axial_ratio / 2.0 + moment_ratio - 1.0
    return axial_ratio + (8.0 / 9.0) * moment_ratio - 1.0


def effective_length_factor_sway(g_a: float, g_b: float) -> float:
    """Sway-frame effective length factor from end stiffness ratios
    (Dumonteil's closed-form fit to the alignment chart)."""
    return math.sqrt((1.6 * g_a * g_b + 4.0 * (g_a + g_b) + 7.5) / (g_a + g_b + 7.5))


def _joint_stiffness_ratios(model: FrameModel, assignment):
    """Per-node G = sum(I_col/L_col) / sum(I_beam/L_beam) for sway K factors."""
    col = np.zeros(len(model.nodes))
    beam = np.zeros(len(model.nodes))
    for i, (a, b, g) in enumerate(model.members):
        stiff = assignment[g].moment_of_inertia_x / model.member_length(i)
        tgt = col if model.group_roles[g] == "column" else beam
        tgt[a] += stiff
        tgt[b] += stiff

    fixed_rot = {n for n, dofs in model.supports if "rot" in dofs}
    pinned = {n for n, dofs in model.supports if "rot" not in dofs}

    ratios = np.empty(len(model.nodes))
    for n in range(len(model.nodes)):
        if n in fixed_rot:
            ratios[n] = 1.0     # recommended value for a fixed base
        elif n in pinned:
            ratios[n] = 10.0    # recommended value for a pinned base
        elif beam[n] > 0:
            ratios[n] = col[n] / beam[n]
        else:
            ratios[n] = 10.0
    return ratios


def _member_k_factors(model: FrameModel, assignment, cs: ConstraintSet):
    if cs.k_mode == "fixed":
        return [model.k_factor(g) for _, _, g in model.members]
    ratios = _joint_stiffness_ratios(model, assignment)
    out = []
    for a, b, g in model.members:
        if model.group_roles[g] == "column":
            out.append(effective_length_factor_sway(ratios[a], ratios[b]))
        else:
            out.append(1.0)
    return out


def constraint_values(model: FrameModel, assignment, result: AnalysisResult,
                      cs: ConstraintSet) -> np.ndarray:
    """All active constraint values for one analyzed design, fixed layout.

    Layout (only active families present): per-member stress, roof drift,
    per-story inter-story drift, per-member strength interaction.
    """
    parts = []
    if "stress" in cs.families:
        sigma = member_max_stress(model, assignment, result)
        parts.append(np.abs(sigma / cs.stress_allowable) - 1.0)
    if "lateral_drift" in cs.families:
        if cs.roof_drift_limit_abs is not None:
            g = result.max_lateral_displacement - cs.roof_drift_limit_abs
        else:
            g = result.max_lateral_displacement / model.height - cs.drift_index_R
        parts.append(np.array([g]))
    if "interstory_drift" in cs.families:
        parts.append(result.story_drifts / result.story_heights - cs.interstory_index_RI)
    if "lrfd_interaction" in cs.families:
        k_factors = _member_k_factors(model, assignment, cs)
        E, fy = model.elastic_modulus, model.yield_stress
        g_lrfd = np.empty(len(model.members))
        for i, (_, _, grp) in enumerate(model.members):
            shape = assignment[grp]
            f = result.member_forces[i]
            m_n = shape.plastic_modulus_x * fy
            moment_ratio = f.max_moment / (PHI_BENDING * m_n)
            if model.group_roles[grp] == "beam":
                # beams carry negligible axial force in these frames
                g_lrfd[i] = moment_ratio - 1.0
                continue
            if f.axial < 0:  # compression
                p_n, _ = lrfd_strengths(shape, model.member_length(i),
                                        k_factors[i], E, fy)
                axial_ratio = -f.axial / (PHI_COMPRESSION * p_n)
            else:
                axial_ratio = f.axial / (PHI_TENSION * shape.area * fy)
            g_lrfd[i] = lrfd_interaction_value(axial_ratio, moment_ratio)
        parts.append(g_lrfd)
    return np.concatenate(parts)


def constraint_labels(model: FrameModel, cs: ConstraintSet):
    """Human-readable names matching the constraint_values layout."""
    labels = []
    if "stress" in cs.families:
        labels += [f"stress[m{i}]" for i in range(len(model.members))]
    if "lateral_drift" in cs.families:
        labels.append("roof_drift")
    if "interstory_drift" in cs.families:
        labels += [f"story_drift[{j}]" for j in range(len(model.story_levels))]
    if "lrfd_interaction" in cs.families:
        labels += [f"lrfd[m{i}]" for i in range(len(model.members))]
    return labels
