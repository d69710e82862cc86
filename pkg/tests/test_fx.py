import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from framefx.fx import (
    AlphaBounds,
    FunctioningRule,
    alpha_max,
    expand_continuous,
    expand_discrete,
    reduced_dimension,
    validate_rules,
)
from framefx.problems import SteppedColumnSpec, attach_fx, stepped_column_problem


class TestAlphaMax:
    def test_stepped_column_value(self):
        # 50 segments of 10 cm, radius range [3, 50]: top height 490
        assert alpha_max(3.0, 50.0, 490.0) == pytest.approx(1.0057581, abs=1e-7)

    def test_degenerate_range_tends_to_one(self):
        assert alpha_max(50.0 * (1 - 1e-12), 50.0, 100.0) == pytest.approx(1.0, abs=1e-12)

    def test_closed_form_e(self):
        assert alpha_max(1.0, math.e, 1.0) == pytest.approx(math.e, rel=1e-12)

    def test_bad_range_rejected(self):
        with pytest.raises(ValueError):
            alpha_max(50.0, 3.0, 100.0)
        with pytest.raises(ValueError):
            alpha_max(3.0, 50.0, 0.0)

    def test_roundtrip_reaches_floor(self):
        a = alpha_max(3.0, 50.0, 490.0)
        values = expand_continuous(50.0, a, [0.0, 490.0])
        assert values[-1] == pytest.approx(3.0, rel=1e-12)


class TestExpandContinuous:
    def test_alpha_one_is_uniform(self):
        values = expand_continuous(30.0, 1.0, [0.0, 10.0, 20.0])
        assert np.allclose(values, 30.0)

    def test_direct_power_evaluation(self):
        a = 1.0057581
        values = expand_continuous(30.0, a, [0.0, 10.0])
        assert values[0] == 30.0
        assert values[1] == pytest.approx(30.0 / a**10, rel=1e-14)

    @given(st.floats(1.0 + 1e-9, 1.05))
    def test_strictly_decreasing_for_alpha_above_one(self, a):
        values = expand_continuous(30.0, a, [0.0, 5.0, 17.0, 40.0])
        assert all(v2 < v1 for v1, v2 in zip(values, values[1:]))

    def test_invalid_inputs(self):
        with pytest.raises(ValueError):
            expand_continuous(-1.0, 1.0, [0.0])
        with pytest.raises(ValueError):
            expand_continuous(1.0, 0.5, [0.0])


class TestExpandDiscrete:
    def test_alpha_one_keeps_base_index(self, small_pool):
        idx = expand_discrete(2, 1.0, [0.0, 10.0, 20.0], small_pool)
        assert idx.tolist() == [2, 2, 2]

    def test_hand_enumerated_cap_case(self, small_pool):
        # areas [10, 20, 30, 40]; base 40, target at the second level decays
        # to 28 -> nearest is 30 (|30-28| < |20-28|), staying under the cap
        heights = [0.0, 10.0]
        a = (40.0 / 28.0) ** (1.0 / 10.0)
        idx = expand_discrete(3, a, heights, small_pool)
        assert idx.tolist() == [3, 2]

    def test_base_smallest_stays_at_floor(self, small_pool):
        idx = expand_discrete(0, 1.004, [0.0, 100.0, 200.0], small_pool)
        assert idx.tolist() == [0, 0, 0]

    def test_exhaustive_monotone_over_grid(self, small_pool):
        heights = np.array([0.0, 40.0, 90.0, 150.0])
        a_max = alpha_max(small_pool.min_area, small_pool.max_area, heights[-1])
        for base in range(len(small_pool)):
            for a in np.linspace(1.0, a_max, 25):
                idx = expand_discrete(base, float(a), heights, small_pool)
                areas = [small_pool[i].area for i in idx]
                assert all(a2 <= a1 for a1, a2 in zip(areas, areas[1:]))

    def test_bad_base_index(self, small_pool):
        with pytest.raises(IndexError):
            expand_discrete(9, 1.0, [0.0, 10.0], small_pool)


class TestRules:
    def test_heights_must_start_at_zero(self):
        with pytest.raises(ValueError, match="start at 0"):
            FunctioningRule((0, 1), (5.0, 10.0))

    def test_heights_strictly_ascending(self):
        with pytest.raises(ValueError, match="ascending"):
            FunctioningRule((0, 1, 2), (0.0, 10.0, 10.0))

    def test_alpha_bounds_validation(self):
        with pytest.raises(ValueError):
            AlphaBounds(upper=0.99)

    def test_reduced_dimension_cases(self):
        # one 50-variable profile -> 2 parameters
        rule50 = FunctioningRule(tuple(range(50)), tuple(10.0 * i for i in range(50)))
        assert reduced_dimension([rule50], 50) == 2
        # two 5-group column profiles out of 11 variables -> 5
        r1 = FunctioningRule((0, 1, 2, 3, 4), (0.0, 1.0, 2.0, 3.0, 4.0))
        r2 = FunctioningRule((5, 6, 7, 8, 9), (0.0, 1.0, 2.0, 3.0, 4.0))
        assert reduced_dimension([r1, r2], 11) == 5
        # two 8-group profiles out of 20 variables -> 8 (16 columns -> 4)
        r1 = FunctioningRule(tuple(range(4, 12)), tuple(float(i) for i in range(8)))
        r2 = FunctioningRule(tuple(range(12, 20)), tuple(float(i) for i in range(8)))
        assert reduced_dimension([r1, r2], 20) == 8

    def test_overlapping_rules_rejected(self):
        r1 = FunctioningRule((0, 1, 2), (0.0, 1.0, 2.0))
        r2 = FunctioningRule((2, 3, 4), (0.0, 1.0, 2.0))
        with pytest.raises(ValueError, match="overlap"):
            reduced_dimension([r1, r2], 5)

    def test_out_of_range_ids_rejected(self):
        r = FunctioningRule((0, 7), (0.0, 1.0))
        with pytest.raises(ValueError, match="outside"):
            validate_rules([r], 5)


class TestWrapObjective:
    def test_identity_embedding(self):
        problem = stepped_column_problem(SteppedColumnSpec(segment_count=10))
        reduced = attach_fx(problem)
        full_const = np.full(10, 30.0)
        ev_full = problem.evaluate(full_const)
        ev_red = reduced.evaluate(np.array([30.0, 1.0]))
        assert ev_red.objective == ev_full.objective
        assert np.array_equal(ev_red.violations, ev_full.violations)

    def test_expansion_respects_box(self):
        spec = SteppedColumnSpec(segment_count=25)
        problem = stepped_column_problem(spec)
        reduced = attach_fx(problem)
        rng = np.random.default_rng(3)
        for _ in range(200):
            xr = reduced.lower + rng.random(2) * (reduced.upper - reduced.lower)
            full = reduced.expand_full(xr)
            assert (full >= spec.radius_min - 1e-12).all()
            assert (full <= spec.radius_max + 1e-12).all()

    def test_reduced_dimension_and_bounds(self):
        problem = stepped_column_problem()
        reduced = attach_fx(problem)
        assert reduced.dimension == 2
        assert reduced.domains[1].lower == 1.0
        assert reduced.domains[1].upper == pytest.approx(1.0057581, abs=1e-7)

    def test_missing_rules_error(self):
        from framefx.problems import sphere_problem
        with pytest.raises(ValueError, match="no functioning rules"):
            attach_fx(sphere_problem())

    def test_double_reduction_rejected(self):
        problem = stepped_column_problem(SteppedColumnSpec(segment_count=5))
        reduced = attach_fx(problem)
        with pytest.raises(ValueError, match="already reduced"):
            attach_fx(reduced)

    @settings(max_examples=30)
    @given(st.floats(3.0, 50.0), st.floats(1.0, 1.0057581))
    def test_reduced_weight_at_least_optimal_envelope(self, base, a):
        # any reduced point evaluates like its expanded full vector
        problem = stepped_column_problem(SteppedColumnSpec(segment_count=8))
        reduced = attach_fx(problem)
        xr = np.array([base, a])
        full = reduced.expand_full(xr)
        assert reduced.evaluate(xr).objective == problem.evaluate(full).objective


class TestWrapDelegation:
    def test_wrap_objective_matches_attach_fx(self):
        from framefx.fx import wrap_objective
        problem = stepped_column_problem(SteppedColumnSpec(segment_count=6))
        wrapped = wrap_objective(problem)
        assert wrapped.dimension == 2
        xr = np.array([12.0, 1.002])
        assert wrapped.evaluate(xr).objective == \
            attach_fx(problem).evaluate(xr).objective
