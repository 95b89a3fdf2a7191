"""Tracking-error objective ``TE(x) = ||y - R x||^2 / T`` and its gradient."""

from __future__ import annotations

from typing import Protocol

import numpy as np

from .core import TrackingProblem

__all__ = [
    "SmoothObjective",
    "TrackingError",
    "te_value",
    "te_gradient",
    "te_lipschitz_bound",
]


class SmoothObjective(Protocol):
    """What the solver needs: a value and a gradient with Lipschitz continuity."""

    def value(self, x: np.ndarray) -> float: ...

    def gradient(self, x: np.ndarray) -> np.ndarray: ...


def te_value(problem: TrackingProblem, x) -> float:
    resid = problem.index_returns - problem.returns @ np.asarray(x, dtype=float)
    return float(resid @ resid) / problem.period_count


def te_gradient(problem: TrackingProblem, x) -> np.ndarray:
    R = problem.returns
    resid = R @ np.asarray(x, dtype=float) - problem.index_returns
    return (2.0 / problem.period_count) * (R.T @ resid)


def te_lipschitz_bound(
    problem: TrackingProblem, tol: float = 1e-13, max_iter: int = 100_000
) -> float:
    """Lipschitz constant ``(2/T) * sigma_max(R)^2`` of the TE gradient.

    The top eigenvalue of ``R^T R`` is found by power iteration from a fixed
    start, so the result is deterministic.
    """
    R = problem.returns
    if not np.any(R):
        raise ValueError("returns matrix is zero")
    n = R.shape[1]
    v = np.ones(n) + np.arange(n) / n
    v /= np.linalg.norm(v)
    eig = 0.0
    for _ in range(max_iter):
        w = R.T @ (R @ v)
        norm = np.linalg.norm(w)
        if norm == 0.0:
            # start vector in the null space; perturb deterministically
            v = np.roll(v, 1) + 1.0 / n
            v /= np.linalg.norm(v)
            continue
        new = float(v @ w)
        v = w / norm
        if abs(new - eig) <= tol * new:
            eig = new
            break
        eig = new
    return 2.0 * eig / problem.period_count


class TrackingError:
    """:class:`SmoothObjective` adapter for a :class:`TrackingProblem`."""

    def __init__(self, problem: TrackingProblem):
        self.problem = problem

    def value(self, x) -> float:
        return te_value(self.problem, x)

    def gradient(self, x) -> np.ndarray:
        return te_gradient(self.problem, x)

    def lipschitz(self) -> float:
        return te_lipschitz_bound(self.problem)
