"""Domain types shared by the projection, solver and experiment modules."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "ValidationError",
    "InfeasibleConstraintError",
    "TrackingProblem",
    "SparseSimplexConstraint",
    "SolverParams",
    "SolveResult",
    "validate_constraint",
    "validate_problem",
    "check_weights",
]

SUM_TOL = 1e-9
BOX_TOL = 1e-12


class ValidationError(ValueError):
    """Invalid input data. ``field`` names the offending attribute."""

    def __init__(self, message: str, field: str | None = None):
        super().__init__(message)
        self.field = field


class InfeasibleConstraintError(ValidationError):
    """The sparse capped simplex is empty (cap * cardinality < 1)."""


def _frozen(a, ndim: int) -> np.ndarray:
    arr = np.array(a, dtype=float, ndmin=ndim)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class TrackingProblem:
    """Asset returns ``returns`` (T x n) and index returns ``index_returns`` (T,).

    Shapes are not checked here; call :func:`validate_problem`.
    """

    returns: np.ndarray
    index_returns: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "returns", _frozen(self.returns, 2))
        object.__setattr__(self, "index_returns", _frozen(self.index_returns, 1))

    @property
    def period_count(self) -> int:
        return self.returns.shape[0]

    @property
    def asset_count(self) -> int:
        return self.returns.shape[1]


@dataclass(frozen=True)
class SparseSimplexConstraint:
    """The set {x : sum(x) = 1, 0 <= x <= cap, at most ``cardinality`` nonzeros}."""

    cardinality: int
    cap: float
    dimension: int


@dataclass(frozen=True)
class SolverParams:
    l_min: float = 1e-8
    l_max: float = 1e8
    tau: float = 2.0
    c: float = 1e-4
    memory: int = 3
    step_tol: float = 1e-6
    max_iter: int = 10_000
    rng_seed: int = 0

    def __post_init__(self):
        if not 0 < self.l_min < self.l_max:
            raise ValidationError("need 0 < l_min < l_max", "l_min")
        if not self.tau > 1:
            raise ValidationError("tau must exceed 1", "tau")
        if not self.c > 0:
            raise ValidationError("c must be positive", "c")
        if self.memory < 0:
            raise ValidationError("memory must be nonnegative", "memory")
        if not self.step_tol > 0:
            raise ValidationError("step_tol must be positive", "step_tol")
        if self.max_iter < 1:
            raise ValidationError("max_iter must be positive", "max_iter")


@dataclass(frozen=True)
class SolveResult:
    """Output of :func:`npgtrack.solver.npg_solve`.

    ``objective_trace`` starts with f(x0), so it is one longer than
    ``inner_counts``.
    """

    weights: np.ndarray
    objective_trace: np.ndarray
    inner_counts: np.ndarray
    status: str
    stationarity_residual: float
    final_l: float
    step_norms: np.ndarray = field(default_factory=lambda: np.empty(0))

    @property
    def iterations(self) -> int:
        return len(self.inner_counts)

    @property
    def converged(self) -> bool:
        return self.status == "converged_step_tol"


def validate_constraint(constraint: SparseSimplexConstraint) -> None:
    r, u, n = constraint.cardinality, constraint.cap, constraint.dimension
    if int(n) != n or n < 1:
        raise ValidationError(f"dimension must be a positive integer, got {n}", "dimension")
    if int(r) != r or not 1 <= r <= n:
        raise ValidationError(f"cardinality must lie in [1, {n}], got {r}", "cardinality")
    if not np.isfinite(u) or u > 1:
        raise ValidationError(f"cap must be at most 1, got {u}", "cap")
    if u * r < 1:
        raise InfeasibleConstraintError(
            f"infeasible: cap * cardinality = {u * r:g} < 1", "cap"
        )


def validate_problem(problem: TrackingProblem, constraint: SparseSimplexConstraint) -> None:
    """Raise :class:`ValidationError` unless the pair is solvable."""
    R, y = problem.returns, problem.index_returns
    if R.ndim != 2 or R.shape[0] < 1 or R.shape[1] < 1:
        raise ValidationError(f"returns must be a nonempty matrix, got shape {R.shape}", "returns")
    if y.shape != (R.shape[0],):
        raise ValidationError(
            f"dimension mismatch: returns has {R.shape[0]} rows but index_returns "
            f"has shape {y.shape}",
            "index_returns",
        )
    if not np.all(np.isfinite(R)):
        raise ValidationError("returns contains non-finite entries", "returns")
    if not np.all(np.isfinite(y)):
        raise ValidationError("index_returns contains non-finite entries", "index_returns")
    if constraint.dimension != problem.asset_count:
        raise ValidationError(
            f"dimension mismatch: constraint has dimension {constraint.dimension}, "
            f"problem has {problem.asset_count} assets",
            "dimension",
        )
    validate_constraint(constraint)


def check_weights(x, constraint: SparseSimplexConstraint) -> None:
    """Assert that ``x`` lies in the sparse capped simplex.

    Zero means exactly zero; the projection never leaves tiny residues.
    """
    x = np.asarray(x, dtype=float)
    assert x.shape == (constraint.dimension,), f"shape {x.shape} != ({constraint.dimension},)"
    assert abs(x.sum() - 1.0) <= SUM_TOL, f"sum(x) = {x.sum()!r}"
    assert x.min() >= -BOX_TOL, f"min(x) = {x.min()!r}"
    assert x.max() <= constraint.cap + BOX_TOL, f"max(x) = {x.max()!r} > cap {constraint.cap}"
    nnz = np.count_nonzero(x)
    assert nnz <= constraint.cardinality, f"{nnz} nonzeros > {constraint.cardinality}"
