"""Sparse index tracking by a nonmonotone projected gradient method."""

from .core import (
    InfeasibleConstraintError,
    SolveResult,
    SolverParams,
    SparseSimplexConstraint,
    TrackingProblem,
    ValidationError,
    check_weights,
    validate_problem,
)
from .experiments import (
    EvaluationRow,
    PriceSeries,
    consistency,
    load_csv_prices,
    load_orlibrary,
    prices_to_returns,
    split_train_test,
    superiority,
    tracking_errors,
)
from .objective import TrackingError, te_gradient, te_lipschitz_bound, te_value
from .projection import project_sparse_capped_simplex, solve_capped_simplex_multiplier
from .solver import SolverError, npg_solve, random_feasible_point

__version__ = "0.1.0"

__all__ = [
    "EvaluationRow",
    "InfeasibleConstraintError",
    "PriceSeries",
    "SolveResult",
    "SolverError",
    "SolverParams",
    "SparseSimplexConstraint",
    "TrackingError",
    "TrackingProblem",
    "ValidationError",
    "check_weights",
    "consistency",
    "load_csv_prices",
    "load_orlibrary",
    "npg_solve",
    "prices_to_returns",
    "project_sparse_capped_simplex",
    "random_feasible_point",
    "solve_capped_simplex_multiplier",
    "split_train_test",
    "superiority",
    "te_gradient",
    "te_lipschitz_bound",
    "te_value",
    "tracking_errors",
    "validate_problem",
]
