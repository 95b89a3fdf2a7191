"""Projecting onto the sparse capped simplex.

The feasible portfolios are weights that sum to one, sit in [0, u] and use
at most r assets.  The projection keeps the r largest coordinates, then
shifts and clips them.  Here we look at a small example and check it against
enumerating every support.
"""
# %%
from itertools import combinations

import numpy as np

from npgtrack import SparseSimplexConstraint, project_sparse_capped_simplex
from npgtrack.projection import capped_sum_residual, solve_capped_simplex_multiplier, top_r_indices

a = np.array([0.9, -0.2, 0.6, 0.3, 0.55])
c = SparseSimplexConstraint(cardinality=3, cap=0.4, dimension=5)

x = project_sparse_capped_simplex(a, c)
print("input     ", a)
print("projection", x, "sum", x.sum())

# %% The multiplier solves sum(clip(a_i + lam, 0, u)) = 1 over the kept entries.
support = top_r_indices(a, c.cardinality)
sol = solve_capped_simplex_multiplier(a[support], c.cap)
print("support", support, "lambda*", sol.lam, "residual", sol.residual)

grid = np.linspace(-1.5, 1.0, 11)
for lam, h in zip(grid, capped_sum_residual(a[support], c.cap, grid)):
    print(f"  h({lam:+.2f}) = {h:+.3f}")

# %% Brute force: best point over every 3-element support.
best = np.inf
for s in combinations(range(a.size), 3):
    s = list(s)
    sub = project_sparse_capped_simplex(a[s], SparseSimplexConstraint(3, c.cap, 3))
    y = np.zeros_like(a)
    y[s] = sub
    best = min(best, np.sum((y - a) ** 2))
print("distance", np.sum((x - a) ** 2), "best over supports", best)
