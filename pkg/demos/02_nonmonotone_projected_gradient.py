"""Running the NPG solver on a planted tracking problem.

We build returns R, pick a sparse feasible portfolio x*, set y = R x* and
ask the solver to find it again from random starts.  The objective trace
need not decrease every step (memory M > 0), but its running maximum over
the last M + 1 values does.
"""
# %%
import numpy as np

from npgtrack import (
    SolverParams,
    SparseSimplexConstraint,
    TrackingError,
    TrackingProblem,
    npg_solve,
    random_feasible_point,
)

rng = np.random.default_rng(0)
n, r, T = 25, 5, 80
R = rng.normal(0.001, 0.02, size=(T, n))
c = SparseSimplexConstraint(r, 0.5, n)
x_star = random_feasible_point(c, 99)
objective = TrackingError(TrackingProblem(R, R @ x_star))

# %%
for seed in range(5):
    res = npg_solve(objective, c, SolverParams(memory=3, rng_seed=seed))
    hit = set(np.flatnonzero(res.weights)) == set(np.flatnonzero(x_star))
    print(
        f"seed {seed}: {res.status:20s} iters {res.iterations:4d} "
        f"TE {res.objective_trace[-1]:.2e} support recovered {hit} "
        f"residual {res.stationarity_residual:.1e}"
    )

# %% Objective trace of one run: raw values and the windowed maximum.
res = npg_solve(objective, c, SolverParams(memory=3, rng_seed=3))
trace = res.objective_trace
window = [max(trace[max(0, k - 3): k + 1]) for k in range(len(trace))]
for k in range(min(15, len(trace))):
    print(f"k={k:2d}  f={trace[k]:.3e}  max window={window[k]:.3e}  inner={res.inner_counts[k - 1] if k else '-'}")
