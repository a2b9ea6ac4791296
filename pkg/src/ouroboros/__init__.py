"""Self-replicating functions: checkers, solution families, and a search.

A function is ouroboros when feeding its own output back into every
argument reproduces that output, f(f(x), ..., f(x)) = f(x). The package
checks this identity exactly for linear forms and by sampling for general
expressions, carries the closed-form solution families of two first-order
transport equations, verifies the expectation operator's idempotence, and
searches numerically for solutions of the combined system.
"""

from .core import (
    EXACT_TOL,
    SAMPLED_TOL,
    LinearForm,
    OuroborosReport,
    SampleDomain,
    Verdict,
    check_linear_exact,
    check_sampled,
    diagonal_self_apply,
)
from .expr import (
    Add,
    Const,
    Div,
    EvaluationError,
    Expr,
    Mul,
    Neg,
    ParseError,
    Pow,
    Sub,
    Var,
    constant_fold,
    differentiate,
    dimension,
    evaluate,
    evaluate_many,
    parse,
    to_string,
)
from .explorer import (
    AnsatzPolynomial,
    Classification,
    ExplorationConfig,
    ExplorationReport,
    LinearSolutionSet,
    explore,
    linear_case_exact,
    mean_theta,
    monomial_exponents,
)
from .families import (
    HeadAverageSolution,
    arithmetic_mean,
    constant_function,
    head_average_solution,
    unit_sum_solution_family,
    weighted_average,
)
from .pde import (
    AlternatingBalanceReport,
    PdeKind,
    PdeSpec,
    ResidualReport,
    SystemReport,
    check_alternating_balance,
    check_residual,
    check_system,
    finite_difference,
    residual_expr,
    verify_mean_system,
)
from .probability import (
    DiscreteRandomVariable,
    ExpectationReport,
    SimpleRandomVariable,
    as_constant_rv,
    check_expectation_ouroboros,
    expected_value,
    lebesgue_integral,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # expressions
    "Add", "Const", "Div", "EvaluationError", "Expr", "Mul", "Neg",
    "ParseError", "Pow", "Sub", "Var", "constant_fold", "differentiate",
    "dimension", "evaluate", "evaluate_many", "parse", "to_string",
    # self-application checks
    "EXACT_TOL", "SAMPLED_TOL", "LinearForm", "OuroborosReport",
    "SampleDomain", "Verdict", "check_linear_exact", "check_sampled",
    "diagonal_self_apply",
    # solution families
    "HeadAverageSolution", "arithmetic_mean", "constant_function",
    "head_average_solution", "unit_sum_solution_family", "weighted_average",
    # expectation
    "DiscreteRandomVariable", "ExpectationReport", "SimpleRandomVariable",
    "as_constant_rv", "check_expectation_ouroboros", "expected_value",
    "lebesgue_integral",
    # transport equations
    "AlternatingBalanceReport", "PdeKind", "PdeSpec", "ResidualReport",
    "SystemReport", "check_alternating_balance", "check_residual",
    "check_system", "finite_difference", "residual_expr",
    "verify_mean_system",
    # numerical search
    "AnsatzPolynomial", "Classification", "ExplorationConfig",
    "ExplorationReport", "LinearSolutionSet", "explore",
    "linear_case_exact", "mean_theta", "monomial_exponents",
]
