"""Residual checks for two first-order transport equations.

Equation I (range parameter beta, 1 <= beta <= n):

    du/dx_1 + ... + du/dx_beta = beta * du/dx_n

Equation II (n even in the interesting cases):

    sum_{k=1..n} (-1)^k * du/dx_k = 0

Residuals follow the left-minus-right convention, stated here once and
recorded in every report. "Symbolically zero" means the residual expression
constant-folds to a constant of magnitude at most 1e-12; for polynomial u
the fold is complete, and the small slack absorbs coefficient round-off
(a family built from floating-point coefficients solves its equation up to
one or two ulps, not to the last bit). Sampled residual maxima are computed
twice, once from the exact symbolic derivatives and once from central finite
differences on u itself, so the two routes cross-check each other.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

from .core import LinearForm, OuroborosReport, SampleDomain, check_linear_exact, check_sampled
from .expr import Const, Expr, constant_fold, differentiate, dimension, evaluate, evaluate_many, mul, neg, sub
from .expr import add as expr_add
from .families import arithmetic_mean

__all__ = [
    "AlternatingBalanceReport",
    "PdeKind",
    "PdeSpec",
    "ResidualReport",
    "SystemReport",
    "check_alternating_balance",
    "check_residual",
    "check_system",
    "finite_difference",
    "residual_expr",
    "verify_mean_system",
]

SYMBOLIC_ZERO_TOL = 1e-12
DEFAULT_FD_STEP = 1e-5
RESIDUAL_TOL = 1e-9


class PdeKind(str, Enum):
    EQ_I = "I"
    EQ_II = "II"


@dataclass(frozen=True)
class PdeSpec:
    """Which equation to check, in which dimension; beta only applies to I."""

    kind: PdeKind
    n: int
    beta: int | None = None

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError("dimension must be at least 1")
        if self.kind is PdeKind.EQ_I:
            if self.beta is None:
                raise ValueError("equation I needs a range parameter beta")
            if not 1 <= self.beta <= self.n:
                raise ValueError(f"beta must lie in 1..{self.n}, got {self.beta}")
        elif self.beta is not None:
            raise ValueError("beta only applies to equation I")


@dataclass(frozen=True)
class ResidualReport:
    """Outcome of a residual check; left-minus-right sign convention."""

    symbolic_zero: bool
    residual_constant: float | None
    max_abs_residual: float
    max_abs_residual_fd: float
    samples_used: int
    note: str | None = None

    def passes(self, tol: float = RESIDUAL_TOL) -> bool:
        return self.symbolic_zero or self.max_abs_residual <= tol

    def to_dict(self) -> dict:
        return {
            "convention": "left minus right",
            "symbolic_zero": self.symbolic_zero,
            "residual_constant": self.residual_constant,
            "max_abs_residual": self.max_abs_residual,
            "max_abs_residual_fd": self.max_abs_residual_fd,
            "samples_used": self.samples_used,
            "note": self.note,
        }


def residual_expr(u: Expr, spec: PdeSpec) -> Expr:
    """Residual of u against the chosen equation, as an expression."""
    if dimension(u) > spec.n:
        raise ValueError(f"u uses x{dimension(u)} but the equation has n={spec.n}")
    if spec.kind is PdeKind.EQ_I:
        total: Expr = differentiate(u, 1)
        for k in range(2, spec.beta + 1):
            total = expr_add(total, differentiate(u, k))
        rhs = mul(Const(float(spec.beta)), differentiate(u, spec.n))
        return sub(total, rhs)
    # equation II: signs alternate starting with -1 at k = 1
    total = neg(differentiate(u, 1))
    for k in range(2, spec.n + 1):
        term = differentiate(u, k)
        total = expr_add(total, term if k % 2 == 0 else neg(term))
    return total


def check_residual(
    u: Expr,
    spec: PdeSpec,
    dom: SampleDomain,
    fd_step: float = DEFAULT_FD_STEP,
) -> ResidualReport:
    """Fold the residual, then bound it on samples by two independent routes.

    The symbolic route evaluates the exact residual expression; the second
    route rebuilds the residual from central finite differences of u alone.
    """
    if dom.n != spec.n:
        raise ValueError("sample domain and equation dimension disagree")
    residual = residual_expr(u, spec)
    folded = constant_fold(residual)
    note = None
    if isinstance(folded, Const):
        symbolic_zero = abs(folded.value) <= SYMBOLIC_ZERO_TOL
        residual_constant = folded.value
    else:
        symbolic_zero = False
        residual_constant = None
        note = "residual did not fold to a constant; sampled bound only"

    points = dom.samples()
    max_abs = float(np.abs(evaluate_many(residual, points)).max())
    fd = _fd_residual(u, spec, points, fd_step)
    max_abs_fd = float(np.abs(fd).max())
    return ResidualReport(
        symbolic_zero=symbolic_zero,
        residual_constant=residual_constant,
        max_abs_residual=max_abs,
        max_abs_residual_fd=max_abs_fd,
        samples_used=dom.count,
        note=note,
    )


def _fd_partials(u: Expr, points: np.ndarray, k: int, h: float) -> np.ndarray:
    shifted_up = points.copy()
    shifted_up[:, k - 1] += h
    shifted_down = points.copy()
    shifted_down[:, k - 1] -= h
    return (evaluate_many(u, shifted_up) - evaluate_many(u, shifted_down)) / (2.0 * h)


def _fd_residual(u: Expr, spec: PdeSpec, points: np.ndarray, h: float) -> np.ndarray:
    if spec.kind is PdeKind.EQ_I:
        total = np.zeros(points.shape[0])
        for k in range(1, spec.beta + 1):
            total += _fd_partials(u, points, k, h)
        return total - spec.beta * _fd_partials(u, points, spec.n, h)
    total = np.zeros(points.shape[0])
    for k in range(1, spec.n + 1):
        sign = 1.0 if k % 2 == 0 else -1.0
        total += sign * _fd_partials(u, points, k, h)
    return total


def finite_difference(u: Expr, k: int, x: Sequence[float], h: float = DEFAULT_FD_STEP) -> float:
    """Central difference estimate of du/dx_k at x."""
    up = [float(v) for v in x]
    down = [float(v) for v in x]
    up[k - 1] += h
    down[k - 1] -= h
    return (evaluate(u, up) - evaluate(u, down)) / (2.0 * h)


@dataclass(frozen=True)
class AlternatingBalanceReport:
    """Linear form against equation II: odd and even coefficient sums."""

    holds: bool
    odd_sum: float
    even_sum: float

    def to_dict(self) -> dict:
        return {"holds": self.holds, "odd_sum": self.odd_sum, "even_sum": self.even_sum}


def check_alternating_balance(coeffs) -> AlternatingBalanceReport:
    """u = sum(c_k x_k) solves equation II iff odd- and even-indexed sums agree.

    Indices are 1-based: c_1 is odd. Requires an even number of coefficients.
    """
    coeffs = tuple(float(c) for c in coeffs)
    n = len(coeffs)
    if n < 2 or n % 2 != 0:
        raise ValueError(f"an even dimension of at least 2 is required, got n={n}")
    odd_sum = math.fsum(coeffs[0::2])
    even_sum = math.fsum(coeffs[1::2])
    return AlternatingBalanceReport(
        holds=abs(odd_sum - even_sum) <= SYMBOLIC_ZERO_TOL,
        odd_sum=odd_sum,
        even_sum=even_sum,
    )


@dataclass(frozen=True)
class SystemReport:
    """Four sub-verdicts for the overdetermined system at even n.

    The system couples equation I with beta = n, equation II, the anchor
    u(0, ..., 0) = 0, and the self-application identity.
    """

    eq1: ResidualReport
    eq2: ResidualReport
    origin_value: float
    zero_at_origin: bool
    ouroboros: OuroborosReport

    @property
    def all_hold(self) -> bool:
        return (
            self.eq1.symbolic_zero
            and self.eq2.symbolic_zero
            and self.zero_at_origin
            and self.ouroboros.holds
        )

    def to_dict(self) -> dict:
        return {
            "eq1": self.eq1.to_dict(),
            "eq2": self.eq2.to_dict(),
            "origin_value": self.origin_value,
            "zero_at_origin": self.zero_at_origin,
            "ouroboros": self.ouroboros.to_dict(),
            "all_hold": self.all_hold,
        }


def check_system(u: Expr | LinearForm, n: int, dom: SampleDomain) -> SystemReport:
    """Check a candidate against the full system in even dimension n."""
    if n < 2 or n % 2 != 0:
        raise ValueError(f"the system needs an even dimension of at least 2, got n={n}")
    if dom.n != n:
        raise ValueError("sample domain and system dimension disagree")
    if isinstance(u, LinearForm):
        expr = u.to_expr()
        ouro = check_linear_exact(u)
    else:
        expr = u
        ouro = check_sampled(u, dom)
    eq1 = check_residual(expr, PdeSpec(PdeKind.EQ_I, n=n, beta=n), dom)
    eq2 = check_residual(expr, PdeSpec(PdeKind.EQ_II, n=n), dom)
    origin = evaluate(expr, (0.0,) * n)
    return SystemReport(
        eq1=eq1,
        eq2=eq2,
        origin_value=origin,
        zero_at_origin=origin == 0.0,
        ouroboros=ouro,
    )


def verify_mean_system(n: int, dom: SampleDomain | None = None) -> SystemReport:
    """The arithmetic mean solves the full system in any even dimension."""
    if dom is None:
        dom = SampleDomain(n=n, radius=2.0, seed=0, count=200)
    return check_system(arithmetic_mean(n), n, dom)
