"""Nonmonotone projected gradient (NPG) method over the sparse capped simplex.

Each outer iteration starts from a Barzilai-Borwein guess for the inverse
stepsize ``L`` and doubles it (by ``tau``) until the projected step

    x+ = P(x - grad f(x) / L)

passes a nonmonotone sufficient-decrease test against the largest objective
value among the last ``memory + 1`` iterates.
"""

from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .core import (
    SolveResult,
    SolverParams,
    SparseSimplexConstraint,
    check_weights,
    validate_constraint,
)
from .objective import SmoothObjective
from .projection import project_sparse_capped_simplex

__all__ = [
    "SolverError",
    "NpgState",
    "bb_initial_stepsize",
    "npg_step_candidate",
    "nonmonotone_accept",
    "inner_iteration_bound",
    "stationarity_residual",
    "random_feasible_point",
    "npg_solve",
]

logger = logging.getLogger(__name__)

INITIAL_L = 1.0
# L grows geometrically; past this many doublings f is not Lipschitz in practice
MAX_INNER = 2000


class SolverError(RuntimeError):
    def __init__(self, message: str, iteration: int):
        super().__init__(f"iteration {iteration}: {message}")
        self.iteration = iteration


@dataclass
class NpgState:
    current: np.ndarray
    memory: int
    previous: np.ndarray | None = None
    iteration: int = 0
    last_l: float = INITIAL_L
    f_history: deque = field(init=False)

    def __post_init__(self):
        self.f_history = deque(maxlen=self.memory + 1)

    @property
    def reference_value(self) -> float:
        return max(self.f_history)


def bb_initial_stepsize(s, y_vec, l_min: float, l_max: float) -> float:
    """Clamped Barzilai-Borwein quotient ``s.y / s.s``."""
    s = np.asarray(s, dtype=float)
    ss = float(s @ s)
    if ss == 0.0:
        raise ValueError("zero step: the BB quotient is undefined")
    return max(l_min, min(l_max, float(s @ np.asarray(y_vec, dtype=float)) / ss))


def npg_step_candidate(x_k, grad, l_k: float, constraint: SparseSimplexConstraint) -> np.ndarray:
    return project_sparse_capped_simplex(np.asarray(x_k) - np.asarray(grad) / l_k, constraint)


def nonmonotone_accept(f_new: float, f_history, c: float, step_sq_norm: float) -> bool:
    return f_new <= max(f_history) - 0.5 * c * step_sq_norm


def inner_iteration_bound(l_f: float, c: float, l_min: float, tau: float) -> int:
    """Worst-case number of L increases in one outer iteration."""
    return max(int(np.floor((np.log(l_f + c) - np.log(l_min)) / np.log(tau) + 1)), 1)


def stationarity_residual(
    objective: SmoothObjective, x, constraint: SparseSimplexConstraint, l_ref: float
) -> float:
    """``||x - P(x - grad f(x) / l_ref)||``; zero at fixed points of the step."""
    x = np.asarray(x, dtype=float)
    return float(np.linalg.norm(x - npg_step_candidate(x, objective.gradient(x), l_ref, constraint)))


def random_feasible_point(constraint: SparseSimplexConstraint, seed: int) -> np.ndarray:
    """Uniform weights on a random support of size ``cardinality``, then projected."""
    validate_constraint(constraint)
    rng = np.random.default_rng(seed)
    n, r = constraint.dimension, constraint.cardinality
    support = rng.choice(n, size=r, replace=False)
    a = np.zeros(n)
    a[support] = rng.dirichlet(np.ones(r))
    return project_sparse_capped_simplex(a, constraint)


def _checked(value, what: str, k: int):
    if not np.all(np.isfinite(value)):
        raise SolverError(f"non-finite {what}", k)
    return value


def npg_solve(
    objective: SmoothObjective,
    constraint: SparseSimplexConstraint,
    params: SolverParams | None = None,
    x0=None,
) -> SolveResult:
    """Minimize ``objective`` over the sparse capped simplex from ``x0``.

    ``x0`` defaults to :func:`random_feasible_point` with ``params.rng_seed``.
    Stops once the iterate moves by at most ``params.step_tol`` (Euclidean
    norm) or after ``params.max_iter`` outer iterations.
    """
    params = params or SolverParams()
    validate_constraint(constraint)
    if x0 is None:
        x0 = random_feasible_point(constraint, params.rng_seed)
    x = np.array(x0, dtype=float)
    try:
        check_weights(x, constraint)
    except AssertionError as exc:
        raise ValueError(f"x0 is not feasible: {exc}") from None

    state = NpgState(current=x, memory=params.memory)
    fx = float(_checked(objective.value(x), "objective", 0))
    g = _checked(objective.gradient(x), "gradient", 0)
    state.f_history.append(fx)
    trace = [fx]
    inner_counts: list[int] = []
    step_norms: list[float] = []
    l_start = min(max(INITIAL_L, params.l_min), params.l_max)
    status = "max_iter_reached"

    while state.iteration < params.max_iter:
        k = state.iteration
        L = l_start
        for count in range(1, MAX_INNER + 1):
            cand = npg_step_candidate(x, g, L, constraint)
            f_new = float(_checked(objective.value(cand), "objective", k))
            step_sq = float(np.sum((cand - x) ** 2))
            if step_sq == 0.0 or nonmonotone_accept(f_new, state.f_history, params.c, step_sq):
                break
            L *= params.tau
        else:
            raise SolverError(f"no acceptable step after {MAX_INNER} increases of L", k)

        g_new = _checked(objective.gradient(cand), "gradient", k)
        state.previous, state.current = x, cand
        state.iteration += 1
        state.last_l = L
        state.f_history.append(f_new)
        trace.append(f_new)
        inner_counts.append(count)
        step = float(np.sqrt(step_sq))
        step_norms.append(step)
        if step <= params.step_tol:
            x, g = cand, g_new
            status = "converged_step_tol"
            break
        l_start = bb_initial_stepsize(cand - x, g_new - g, params.l_min, params.l_max)
        x, g = cand, g_new

    logger.debug("npg: %s after %d iterations, f=%.6g", status, state.iteration, trace[-1])
    return SolveResult(
        weights=x,
        objective_trace=np.array(trace),
        inner_counts=np.array(inner_counts, dtype=int),
        status=status,
        stationarity_residual=stationarity_residual(objective, x, constraint, state.last_l),
        final_l=state.last_l,
        step_norms=np.array(step_norms),
    )
