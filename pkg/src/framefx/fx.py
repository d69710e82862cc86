"""Variable functioning: replace a set of design variables with a two-parameter
exponential height profile.

A functioned set of column variables (ordered by the height of each section
above the base) is generated from the base value and a decay rate alpha:
value(h) = base / alpha**h.  With alpha in [1, alpha_max] the profile is
uniform at one end of the range and reaches the catalog floor at the top of
the column at the other, so every expansion is monotone non-increasing with
height, which is also the buildable configuration.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .sections import SectionPool, pool_index_of_nearest_area

__all__ = [
    "FunctioningRule",
    "AlphaBounds",
    "alpha_max",
    "expand_continuous",
    "expand_discrete",
    "reduced_dimension",
    "validate_rules",
    "wrap_objective",
]


@dataclass(frozen=True)
class FunctioningRule:
    """One profile rule: which variables it replaces and at what heights.

    ``replaced_variable_ids`` are ordered lowest-height first and
    ``heights`` are the heights of each replaced cross-section above the
    base (the first entry is the base itself at height 0).  The rule always
    has two parameters: the base value and alpha.
    """

    replaced_variable_ids: tuple
    heights: tuple  # cm

    kind: str = "exponential_column"
    PARAMETER_COUNT = 2

    def __post_init__(self):
        ids = tuple(int(i) for i in self.replaced_variable_ids)
        hts = tuple(float(h) for h in self.heights)
        object.__setattr__(self, "replaced_variable_ids", ids)
        object.__setattr__(self, "heights", hts)
        if self.kind != "exponential_column":
            raise ValueError(f"unknown functioning kind {self.kind!r}")
        if len(ids) != len(hts):
            raise ValueError("replaced_variable_ids and heights differ in length")
        if len(ids) < 2:
            raise ValueError("a functioning rule must replace at least two variables")
        if len(set(ids)) != len(ids):
            raise ValueError("replaced_variable_ids contains duplicates")
        if hts[0] != 0.0:
            raise ValueError("heights must start at 0 (the base section)")
        if any(b <= a for a, b in zip(hts, hts[1:])):
            raise ValueError("heights must be strictly ascending")

    @property
    def replaced_count(self) -> int:
        return len(self.replaced_variable_ids)

    @property
    def top_height(self) -> float:
        return self.heights[-1]


@dataclass(frozen=True)
class AlphaBounds:
    upper: float
    lower: float = 1.0

    def __post_init__(self):
        if self.upper < self.lower:
            raise ValueError(f"alpha upper bound {self.upper} < lower bound {self.lower}")


def alpha_max(value_min: float, value_max: float, h_u: float) -> float:
    """Largest admissible decay rate: the profile that starts at the largest
    catalog value and reaches the smallest at the top height h_u."""
    if not 0 < value_min < value_max:
        raise ValueError(f"need 0 < value_min < value_max, got ({value_min}, {value_max})")
    if h_u <= 0:
        raise ValueError(f"top height must be positive, got {h_u}")
    return (value_max / value_min) ** (1.0 / h_u)


def alpha_bounds_for(rule: FunctioningRule, value_min: float, value_max: float) -> AlphaBounds:
    return AlphaBounds(upper=alpha_max(value_min, value_max, rule.top_height))


def expand_continuous(base_value: float, alpha: float, heights) -> np.ndarray:
    """Pure exponential profile: value[k] = base_value / alpha**heights[k].

    No clamping is applied here; callers that must stay inside a variable
    box (the reduced-problem evaluation path) clamp afterwards.
    """
    if base_value <= 0:
        raise ValueError(f"base_value must be positive, got {base_value}")
    if alpha < 1.0:
        raise ValueError(f"alpha must be >= 1, got {alpha}")
    return base_value / np.power(alpha, np.asarray(heights, dtype=float))


def expand_discrete(base_index: int, alpha: float, heights, pool: SectionPool) -> np.ndarray:
    """Snap the exponential area profile onto the catalog, never increasing.

    Each target area is base area decayed by alpha**h; the nearest catalog
    shape is chosen subject to a cap at the previous pick's area, so the
    resulting areas are non-increasing with height by construction.
    """
    if not 0 <= base_index < len(pool):
        raise IndexError(f"base_index {base_index} out of range for pool of {len(pool)}")
    base_area = pool[base_index].area
    targets = expand_continuous(base_area, alpha, heights)
    indices = np.empty(len(targets), dtype=int)
    indices[0] = base_index
    for k in range(1, len(targets)):
        cap = pool[indices[k - 1]].area
        indices[k] = pool_index_of_nearest_area(pool, float(targets[k]), cap_area=cap)
    return indices


def validate_rules(rules, n: int):
    """Check rules are disjoint and reference valid variable ids."""
    seen = {}
    for r, rule in enumerate(rules):
        for i in rule.replaced_variable_ids:
            if not 0 <= i < n:
                raise ValueError(f"rule {r} references variable {i}, outside 0..{n - 1}")
            if i in seen:
                raise ValueError(
                    f"rules {seen[i]} and {r} overlap on variable {i}"
                )
            seen[i] = r


def reduced_dimension(rules, n: int) -> int:
    """Dimension after functioning: n minus, per rule, the replaced count
    less the two profile parameters."""
    validate_rules(rules, n)
    return n - sum(r.replaced_count - FunctioningRule.PARAMETER_COUNT for r in rules)


def wrap_objective(problem, rules=None):
    """Reduced-space view of a problem (see problems.attach_fx)."""
    from .problems import attach_fx

    return attach_fx(problem, rules)
