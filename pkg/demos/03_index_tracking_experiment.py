"""In-sample / out-of-sample experiment on a synthetic weekly data set.

The real OR-library files (indtrack1..8) are not redistributed here.  We
write a synthetic file in the same layout, sweep densities with a few random
starts each, and compare against a naive baseline: equal weights on the
largest-correlation assets.  Pass ``--data path/to/indtrack1.txt`` to use a
real file instead.
"""
# %%
import argparse
import tempfile
from pathlib import Path

import numpy as np

from npgtrack.cli import main as cli
from npgtrack.experiments import (
    best_rows,
    compare_rows,
    evaluate_density,
    load_orlibrary,
    prices_to_returns,
    split_train_test,
    tracking_errors,
)
from npgtrack.core import SolverParams


def synthetic_orlib(path, n=31, periods=291, seed=1):
    rng = np.random.default_rng(seed)
    market = rng.normal(0.002, 0.025, periods - 1)
    rets = 0.9 * market[:, None] + rng.normal(0, 0.02, (periods - 1, n))
    idx_rets = rets @ rng.dirichlet(np.full(n, 0.5)) + rng.normal(0, 2e-3, periods - 1)
    index = 1000 * np.concatenate([[1.0], np.cumprod(1 + idx_rets)])
    assets = 20 * np.vstack([np.ones(n), np.cumprod(1 + rets, axis=0)])
    lines = [f"{n} {periods - 1}"] + [f"{v:.4f}" for v in index]
    for j in range(n):
        lines += [f"{v:.4f}" for v in assets[:, j]]
    path.write_text("\n".join(lines) + "\n")


parser = argparse.ArgumentParser()
parser.add_argument("--data", default=None)
args, _ = parser.parse_known_args()

workdir = Path(tempfile.mkdtemp())
data = Path(args.data) if args.data else workdir / "synthetic_hangseng.txt"
if args.data is None:
    synthetic_orlib(data)
prices = load_orlibrary(data)
print(f"{prices.name}: {prices.asset_count} assets, {len(prices.index_prices)} prices")

# %% Best of five starts per density, solved on the first half.
rows = []
for density in range(5, 11):
    rows += evaluate_density(prices, density, 0.5, SolverParams(memory=3), seeds=range(5))
for row in best_rows(rows):
    print(f"r={row.density:2d}  TEI {row.tei:.2e}  TEO {row.teo:.2e}  S_true {row.s_true}  {row.runtime_seconds * 1e3:.0f} ms")

# %% A baseline to compare against: equal weights on the r assets most
# correlated with the index over the training half.
train, test = split_train_test(prices_to_returns(prices))
corr = [np.corrcoef(train.returns[:, j], train.index_returns)[0, 1] for j in range(prices.asset_count)]
reference = []
for density in range(5, 11):
    x = np.zeros(prices.asset_count)
    x[np.argsort(corr)[::-1][:density]] = 1.0 / density
    tei, teo = tracking_errors(x, train, test)
    reference.append({"dataset": prices.name, "density": density, "method": "equal-corr", "tei": tei, "teo": teo})

for rec in compare_rows(rows, reference):
    print(f"r={rec['density']:2d}  Cons(npg) {rec['cons']:.2e}  Cons(base) {rec['ref_cons']:.2e}  SupO {rec['supo']:5.1f}%")

# %% The same sweep through the command line.
out = workdir / "sweep.csv"
cli(["sweep", "--data", str(data), "--densities", "5,6,7,8,9,10", "--seeds", "0,1,2,3,4",
     "--best", "--out", str(out)])
print(out.read_text())
