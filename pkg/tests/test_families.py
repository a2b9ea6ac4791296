"""Closed-form families: weighted averages and transport solutions."""

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ouroboros.core import SampleDomain, Verdict, check_linear_exact, check_sampled
from ouroboros.expr import Const, evaluate
from ouroboros.families import (
    HeadAverageSolution,
    arithmetic_mean,
    constant_function,
    head_average_solution,
    unit_sum_solution_family,
    weighted_average,
)
from ouroboros.pde import PdeKind, PdeSpec, check_residual

coeff_values = st.floats(min_value=-3, max_value=3, allow_nan=False)


class TestWeightedAverage:
    def test_accepts_exact_unit_sums(self):
        form = weighted_average((0.5, 1/3, 1/6))
        assert check_linear_exact(form).holds

    def test_rejects_other_sums_with_the_sum_in_the_message(self):
        with pytest.raises(ValueError, match="must sum to 1, got 0.899"):
            weighted_average((0.6, 0.3))

    def test_mean_is_the_equal_weight_case(self):
        assert arithmetic_mean(4).coeffs == (0.25, 0.25, 0.25, 0.25)

    @given(st.lists(coeff_values, min_size=1, max_size=6))
    @settings(max_examples=150)
    def test_every_member_is_self_replicating(self, raw):
        total = math.fsum(raw)
        if abs(total) < 0.3:
            return
        form = weighted_average(tuple(c / total for c in raw))
        report = check_linear_exact(form)
        assert report.verdict is Verdict.HOLDS_EXACT

    @given(st.integers(min_value=1, max_value=30))
    @settings(max_examples=50)
    def test_mean_is_always_a_member(self, n):
        assert check_linear_exact(arithmetic_mean(n)).holds


class TestConstantFunction:
    def test_builds_a_bare_constant(self):
        assert constant_function(2.5, 3) == Const(2.5)

    def test_constants_replicate_under_self_application(self):
        f = constant_function(-1.75, 2)
        dom = SampleDomain(n=2, radius=2.0, seed=3, count=25)
        report = check_sampled(f, dom)
        assert report.holds
        assert report.max_deviation == 0.0

    def test_rejects_nonfinite_and_bad_dimension(self):
        with pytest.raises(ValueError):
            constant_function(float("inf"), 1)
        with pytest.raises(ValueError):
            constant_function(1.0, 0)


class TestHeadAverageSolution:
    def test_last_coefficient_is_the_head_average(self):
        sol = head_average_solution((0.75, -0.25, 0.5), beta=2)
        assert sol.head_average == 0.25
        assert sol.to_linear_form().coeffs == (0.75, -0.25, 0.5, 0.25)

    def test_validation(self):
        with pytest.raises(ValueError):
            HeadAverageSolution(n=4, beta=4, coeffs=(1.0, 2.0, 3.0))  # beta must stay below n
        with pytest.raises(ValueError):
            HeadAverageSolution(n=4, beta=0, coeffs=(1.0, 2.0, 3.0))
        with pytest.raises(ValueError):
            HeadAverageSolution(n=4, beta=1, coeffs=(1.0, 2.0))  # needs n - 1 coefficients

    @given(
        st.integers(min_value=2, max_value=6).flatmap(
            lambda n: st.tuples(
                st.lists(coeff_values, min_size=n - 1, max_size=n - 1),
                st.integers(min_value=1, max_value=n - 1),
            )
        )
    )
    @settings(max_examples=100, deadline=None)
    def test_family_solves_the_head_equation(self, body_and_beta):
        body, beta = body_and_beta
        sol = head_average_solution(tuple(body), beta)
        n = sol.n
        dom = SampleDomain(n=n, radius=2.0, seed=11, count=40)
        report = check_residual(
            sol.to_expr(), PdeSpec(PdeKind.EQ_I, n=n, beta=beta), dom
        )
        assert report.symbolic_zero

    def test_mean_body_gives_the_mean(self):
        sol = head_average_solution((0.25, 0.25, 0.25), beta=2)
        assert sol.to_linear_form().coeffs == arithmetic_mean(4).coeffs


class TestUnitSumSolutionFamily:
    def test_membership_needs_both_conditions(self):
        form = unit_sum_solution_family((0.5, 1/6, 1/3))
        assert form.coeffs[-1] == pytest.approx(1/3)
        # sums to 1 but the last coefficient is not 1/n
        with pytest.raises(ValueError):
            unit_sum_solution_family((0.25, 0.75))
        # last coefficient right, sum wrong
        with pytest.raises(ValueError):
            unit_sum_solution_family((0.9, 0.5))

    def test_members_solve_equation_one_with_full_head(self):
        form = unit_sum_solution_family((0.5, 1/6, 1/3))
        dom = SampleDomain(n=3, radius=2.0, seed=2, count=30)
        report = check_residual(form.to_expr(), PdeSpec(PdeKind.EQ_I, n=3, beta=3), dom)
        assert report.symbolic_zero
        assert check_linear_exact(form).holds

    @given(st.integers(min_value=2, max_value=8), st.lists(coeff_values, min_size=6, max_size=6))
    @settings(max_examples=100, deadline=None)
    def test_random_members_are_ouroboros(self, n, pool):
        body = pool[: n - 2]
        last = 1.0 / n
        first = 1.0 - last - math.fsum(body)
        form = unit_sum_solution_family((first, *body, last))
        assert check_linear_exact(form).holds

    @given(st.integers(min_value=1, max_value=12))
    @settings(max_examples=30)
    def test_mean_is_always_a_member(self, n):
        form = unit_sum_solution_family(arithmetic_mean(n).coeffs)
        assert form.coeffs == arithmetic_mean(n).coeffs


class TestFamilyEvaluation:
    def test_head_average_expression_evaluates_like_its_form(self):
        sol = head_average_solution((0.4, -1.2, 0.8), beta=3)
        x = (0.3, 1.1, -0.7, 0.25)
        via_form = sol.to_linear_form().evaluate(x)
        via_expr = evaluate(sol.to_expr(), x)
        assert via_expr == pytest.approx(via_form, rel=1e-12, abs=1e-15)
