"""Euclidean projection onto the sparse capped simplex.

The feasible set is ``{x : sum(x) = 1, 0 <= x_i <= u, ||x||_0 <= r}``.  The
projection keeps the ``r`` largest entries of the input, shifts them by a
common multiplier and clips to ``[0, u]``.  The multiplier is the root of the
piecewise linear function

    h(lam) = sum_i clip(a_i + lam, 0, u) - 1

located by sweeping its breakpoints ``{-a_i} U {u - a_i}`` in order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import InfeasibleConstraintError, SparseSimplexConstraint, validate_constraint

__all__ = [
    "MultiplierSolution",
    "clip_box",
    "top_r_indices",
    "capped_sum_residual",
    "solve_capped_simplex_multiplier",
    "project_capped_simplex",
    "project_sparse_capped_simplex",
]


@dataclass(frozen=True)
class MultiplierSolution:
    lam: float
    residual: float


def clip_box(t, u: float):
    """Projection of ``t`` onto ``[0, u]``; works elementwise on arrays."""
    if np.ndim(t) == 0:
        return min(max(float(t), 0.0), u)
    return np.clip(t, 0.0, u)


def top_r_indices(a, r: int) -> np.ndarray:
    """Sorted (0-based) indices of the ``r`` largest entries of ``a``.

    Ties go to the lowest index.
    """
    a = np.asarray(a, dtype=float)
    if r >= a.size:
        return np.arange(a.size)
    order = np.argsort(-a, kind="stable")
    return np.sort(order[:r])


def capped_sum_residual(a_sub, u: float, lam):
    """h(lam) = sum_i clip(a_i + lam, 0, u) - 1, vectorized over ``lam``."""
    a_sub = np.asarray(a_sub, dtype=float)
    lam = np.asarray(lam, dtype=float)
    vals = np.clip(a_sub[..., :] + lam[..., None], 0.0, u).sum(axis=-1) - 1.0
    return float(vals) if vals.ndim == 0 else vals


def solve_capped_simplex_multiplier(a_sub, u: float) -> MultiplierSolution:
    """Root of h for the entries ``a_sub``; requires ``len(a_sub) * u >= 1``.

    Duplicate breakpoints are merged so each distinct kink carries the net
    slope change (entries becoming active minus entries hitting the cap).
    Where h vanishes on a whole interval the left endpoint is returned.
    """
    a = np.asarray(a_sub, dtype=float).ravel()
    m = a.size
    if m == 0 or m * u < 1:
        raise InfeasibleConstraintError(
            f"no multiplier exists: {m} entries with cap {u} cannot sum to 1", "cap"
        )

    points = np.concatenate((-a, u - a))
    deltas = np.concatenate((np.ones(m), -np.ones(m)))
    kinks, inverse = np.unique(points, return_inverse=True)
    slopes = np.cumsum(np.bincount(inverse, weights=deltas))
    # h at each kink, h(kinks[0]) = -1
    h = np.empty(kinks.size)
    h[0] = -1.0
    np.cumsum(slopes[:-1] * np.diff(kinks), out=h[1:])
    h[1:] -= 1.0

    hit = np.flatnonzero(h >= 0.0)
    if hit.size == 0:
        # m * u == 1 up to rounding: every entry sits at the cap
        lam = float(kinks[-1])
    elif h[hit[0]] == 0.0:
        lam = float(kinks[hit[0]])
    else:
        j = hit[0] - 1
        # closed form on the bracketing piece, from the active sets rather
        # than the accumulated h values
        ref = kinks[j]
        capped = (u - a) <= ref
        free = ((-a) <= ref) & ~capped
        nfree = np.count_nonzero(free)
        lam = float((1.0 - u * np.count_nonzero(capped) - a[free].sum()) / nfree)
        lam = min(max(lam, kinks[j]), kinks[j + 1])
    res = capped_sum_residual(a, u, lam)
    # rounding cleanup: a couple of Newton steps on the active piece
    for _ in range(2):
        if res == 0.0:
            break
        x = a + lam
        nfree = np.count_nonzero((x > 0.0) & (x < u))
        if nfree == 0:
            break
        trial = lam - res / nfree
        trial_res = capped_sum_residual(a, u, trial)
        if abs(trial_res) >= abs(res):
            break
        lam, res = trial, trial_res
    return MultiplierSolution(lam, res)


def project_capped_simplex(a, u: float) -> np.ndarray:
    """Projection onto ``{sum(x) = 1, 0 <= x <= u}`` without a sparsity bound."""
    a = np.asarray(a, dtype=float)
    if a.size * u >= 1 and _feasible_to_rounding(a, u):
        return a.copy()
    sol = solve_capped_simplex_multiplier(a, u)
    return np.clip(a + sol.lam, 0.0, u)


def _feasible_to_rounding(a: np.ndarray, u: float) -> bool:
    # a point already in the set is its own projection; without this check a
    # sum that is off by an ulp produces a new multiplier of order 1e-16
    if a.size == 0 or a.min() < 0.0 or a.max() > u:
        return False
    return abs(a.sum() - 1.0) <= 4 * a.size * np.finfo(float).eps


def project_sparse_capped_simplex(a, constraint: SparseSimplexConstraint) -> np.ndarray:
    """Closest point to ``a`` in the sparse capped simplex.

    Off-support entries are exactly zero.  With ``cardinality >= len(a)`` this
    is the plain capped-simplex projection.
    """
    validate_constraint(constraint)
    a = np.asarray(a, dtype=float)
    if a.shape != (constraint.dimension,):
        raise ValueError(f"expected shape ({constraint.dimension},), got {a.shape}")
    support = top_r_indices(a, constraint.cardinality)
    x = np.zeros_like(a)
    x[support] = project_capped_simplex(a[support], constraint.cap)
    return x
