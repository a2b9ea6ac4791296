"""Transport equation residuals, the balance criterion, and the full system."""

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ouroboros.core import LinearForm, SampleDomain, Verdict
from ouroboros.expr import evaluate, parse, to_string
from ouroboros.families import arithmetic_mean, head_average_solution
from ouroboros.pde import (
    PdeKind,
    PdeSpec,
    check_alternating_balance,
    check_residual,
    check_system,
    finite_difference,
    residual_expr,
    verify_mean_system,
)

DOM = SampleDomain(n=2, radius=2.0, seed=0, count=64)

coeff_values = st.floats(min_value=-3, max_value=3, allow_nan=False)


class TestPdeSpec:
    def test_equation_one_needs_beta_in_range(self):
        PdeSpec(PdeKind.EQ_I, n=4, beta=4)
        with pytest.raises(ValueError):
            PdeSpec(PdeKind.EQ_I, n=4)
        with pytest.raises(ValueError):
            PdeSpec(PdeKind.EQ_I, n=4, beta=5)
        with pytest.raises(ValueError):
            PdeSpec(PdeKind.EQ_I, n=4, beta=0)

    def test_equation_two_forbids_beta(self):
        PdeSpec(PdeKind.EQ_II, n=4)
        with pytest.raises(ValueError):
            PdeSpec(PdeKind.EQ_II, n=4, beta=2)


class TestResidualExpr:
    def test_left_minus_right_sign_for_equation_one(self):
        # u = x1 in n = 2: head sum is 1, right side 2 * du/dx2 = 0
        r = residual_expr(parse("x1"), PdeSpec(PdeKind.EQ_I, n=2, beta=2))
        assert evaluate(r, (0.3, -0.8)) == 1.0

    def test_alternating_signs_start_negative(self):
        spec = PdeSpec(PdeKind.EQ_II, n=2)
        assert evaluate(residual_expr(parse("x1"), spec), (0.1, 0.2)) == -1.0
        assert evaluate(residual_expr(parse("x2"), spec), (0.1, 0.2)) == 1.0

    def test_dimension_mismatch_is_rejected(self):
        with pytest.raises(ValueError):
            residual_expr(parse("x3"), PdeSpec(PdeKind.EQ_II, n=2))


class TestCheckResidual:
    def test_solution_is_symbolically_zero(self):
        report = check_residual(
            arithmetic_mean(2).to_expr(), PdeSpec(PdeKind.EQ_I, n=2, beta=2), DOM
        )
        assert report.symbolic_zero
        assert report.residual_constant == pytest.approx(0.0, abs=1e-12)
        assert report.max_abs_residual <= 1e-12
        assert report.passes()

    def test_constant_nonzero_residual_is_reported(self):
        report = check_residual(parse("x1"), PdeSpec(PdeKind.EQ_I, n=2, beta=2), DOM)
        assert not report.symbolic_zero
        assert report.residual_constant == 1.0
        assert report.max_abs_residual == 1.0
        assert not report.passes()

    def test_nonconstant_residual_reports_the_sampled_bound(self):
        report = check_residual(parse("x1^2"), PdeSpec(PdeKind.EQ_I, n=2, beta=2), DOM)
        assert not report.symbolic_zero
        assert report.residual_constant is None
        assert report.note is not None and "sampled" in report.note
        # residual is 2*x1, so the bound is twice the largest |x1| drawn
        largest = max(abs(x) for x in DOM.samples()[:, 0])
        assert report.max_abs_residual == pytest.approx(2 * largest, rel=1e-12)

    def test_finite_difference_route_confirms_the_symbolic_one(self):
        for text in ["x1^2", "x1*x2 + x2^2", "(x1 + x2)^2"]:
            report = check_residual(parse(text), PdeSpec(PdeKind.EQ_II, n=2), DOM)
            assert report.max_abs_residual_fd == pytest.approx(
                report.max_abs_residual, rel=1e-5, abs=1e-6
            )

    def test_symbolic_zero_implies_tiny_fd_residual(self):
        report = check_residual(
            arithmetic_mean(4).to_expr(), PdeSpec(PdeKind.EQ_I, n=4, beta=4),
            SampleDomain(n=4, radius=2.0, seed=1, count=64),
        )
        assert report.symbolic_zero
        assert report.max_abs_residual_fd <= 1e-9

    @given(
        st.integers(min_value=2, max_value=5).flatmap(
            lambda n: st.tuples(
                st.just(n),
                st.integers(min_value=1, max_value=n - 1),
                st.lists(coeff_values, min_size=n - 1, max_size=n - 1),
            )
        )
    )
    @settings(max_examples=80, deadline=None)
    def test_head_average_family_passes_for_every_beta(self, nbc):
        n, beta, body = nbc
        sol = head_average_solution(tuple(body), beta)
        dom = SampleDomain(n=n, radius=2.0, seed=5, count=32)
        report = check_residual(sol.to_expr(), PdeSpec(PdeKind.EQ_I, n=n, beta=beta), dom)
        assert report.symbolic_zero
        assert report.max_abs_residual <= 1e-12


class TestAlternatingBalance:
    def test_balanced_pairs_hold(self):
        assert check_alternating_balance((1.0, 1.0)).holds
        assert check_alternating_balance((0.7, 0.3, 0.1, 0.5)).holds

    def test_unbalanced_pairs_fail_with_both_sums(self):
        report = check_alternating_balance((1.0, 0.0))
        assert not report.holds
        assert report.odd_sum == 1.0
        assert report.even_sum == 0.0

    def test_odd_dimension_is_rejected(self):
        with pytest.raises(ValueError):
            check_alternating_balance((1.0, 2.0, 3.0))

    @given(
        st.integers(min_value=1, max_value=3).flatmap(
            lambda half: st.lists(coeff_values, min_size=2 * half, max_size=2 * half)
        ),
        st.booleans(),
    )
    @settings(max_examples=120, deadline=None)
    def test_balance_matches_the_equation_exactly(self, coeffs, make_balanced):
        """Two routes to one fact: the sum criterion vs the folded residual."""
        if make_balanced:
            coeffs[-1] += math.fsum(coeffs[0::2]) - math.fsum(coeffs[1::2])
            if not math.isfinite(coeffs[-1]):
                return
        else:
            gap = abs(math.fsum(coeffs[0::2]) - math.fsum(coeffs[1::2]))
            if gap < 1e-6:
                return  # too close to the knife edge for two float routes
        n = len(coeffs)
        balance = check_alternating_balance(coeffs)
        dom = SampleDomain(n=n, radius=2.0, seed=3, count=16)
        residual = check_residual(
            LinearForm(tuple(coeffs)).to_expr(), PdeSpec(PdeKind.EQ_II, n=n), dom
        )
        assert balance.holds == residual.symbolic_zero == make_balanced


class TestFiniteDifference:
    def test_quadratic_slope(self):
        assert finite_difference(parse("x1^2"), 1, (3.0,)) == pytest.approx(6.0, abs=1e-9)

    def test_constants_have_zero_slope(self):
        assert finite_difference(parse("7"), 1, (0.5,)) == 0.0

    def test_mean_slope_is_one_over_n(self):
        f = arithmetic_mean(4).to_expr()
        got = finite_difference(f, 2, (0.1, 0.2, 0.3, 0.4))
        assert got == pytest.approx(0.25, abs=1e-10)


class TestSystem:
    def test_mean_passes_everything(self):
        for n in (2, 4, 6, 8):
            report = verify_mean_system(n)
            assert report.all_hold
            assert report.eq1.symbolic_zero
            assert report.eq2.symbolic_zero
            assert report.origin_value == 0.0
            assert report.ouroboros.verdict is Verdict.HOLDS_EXACT

    def test_odd_dimension_is_rejected(self):
        with pytest.raises(ValueError):
            verify_mean_system(3)

    def test_unbalanced_tail_fails_only_the_head_equation(self):
        """Self-replicating, balanced, zero at 0, but the tail slope is off."""
        dom = SampleDomain(n=4, radius=2.0, seed=0, count=32)
        report = check_system(LinearForm((0.7, 0.3, -0.2, 0.2)), 4, dom)
        assert report.zero_at_origin
        assert report.ouroboros.holds
        assert report.eq2.symbolic_zero
        assert not report.eq1.symbolic_zero
        assert report.eq1.residual_constant == pytest.approx(0.2, rel=1e-12)
        assert not report.all_hold

    def test_projection_breaks_both_equations_but_nothing_else(self):
        dom = SampleDomain(n=2, radius=2.0, seed=0, count=32)
        report = check_system(parse("x1"), 2, dom)
        assert report.zero_at_origin
        assert report.ouroboros.holds
        assert report.eq2.residual_constant == -1.0
        assert not report.eq1.symbolic_zero
        assert not report.all_hold

    def test_linear_form_input_uses_the_exact_route(self):
        dom = SampleDomain(n=4, radius=2.0, seed=0, count=32)
        report = check_system(arithmetic_mean(4), 4, dom)
        assert report.ouroboros.verdict is Verdict.HOLDS_EXACT

    def test_expression_input_uses_the_sampled_route(self):
        dom = SampleDomain(n=2, radius=2.0, seed=0, count=32)
        report = check_system(arithmetic_mean(2).to_expr(), 2, dom)
        assert report.ouroboros.verdict is Verdict.HOLDS_SAMPLED
        assert report.all_hold

    def test_domain_dimension_must_match(self):
        dom = SampleDomain(n=3, radius=2.0, seed=0, count=8)
        with pytest.raises(ValueError):
            check_system(parse("x1"), 2, dom)

    def test_report_round_trips_through_dict(self):
        report = verify_mean_system(2)
        d = report.to_dict()
        assert d["all_hold"] is True
        assert d["eq1"]["symbolic_zero"] is True
        assert d["ouroboros"]["verdict"] == "holds_exact"


class TestResidualPrinting:
    def test_folded_residual_of_a_square_is_linear(self):
        from ouroboros.expr import constant_fold
        r = residual_expr(parse("x1^2"), PdeSpec(PdeKind.EQ_I, n=2, beta=2))
        assert to_string(constant_fold(r)) == "2*x1"
