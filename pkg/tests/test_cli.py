import csv
import json
import subprocess
import sys

import numpy as np
import pytest

from npgtrack.cli import main


def write_orlib(path, n=31, periods=81, seed=0):
    rng = np.random.default_rng(seed)
    rets = rng.normal(0.001, 0.02, size=(periods - 1, n))
    w = rng.dirichlet(np.ones(n))
    idx = 1000 * np.concatenate([[1.0], np.cumprod(1 + rets @ w + rng.normal(0, 5e-4, periods - 1))])
    assets = 10 * np.vstack([np.ones(n), np.cumprod(1 + rets, axis=0)])
    lines = [f"{n} {periods - 1}"] + [f"{v:.6f}" for v in idx]
    for j in range(n):
        lines += [f"{v:.6f}" for v in assets[:, j]]
    path.write_text("\n".join(lines) + "\n")
    return path


@pytest.fixture
def data(tmp_path):
    return write_orlib(tmp_path / "synth.txt")


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_solve_happy_path(data, tmp_path):
    out = tmp_path / "result.csv"
    code = main(["solve", "--data", str(data), "--format", "orlib", "--density", "10",
                 "--cap", "0.5", "--seed", "7", "--out", str(out)])
    assert code == 0
    rows = read_csv(out)
    assert len(rows) == 1
    assert list(rows[0])[:6] == ["dataset", "density", "tei", "teo", "s_true", "runtime_seconds"]
    assert rows[0]["dataset"] == "synth" and rows[0]["seed"] == "7"
    assert int(rows[0]["s_true"]) <= 10


def test_solve_infeasible_cap(data, capsys):
    code = main(["solve", "--data", str(data), "--density", "2", "--cap", "0.4"])
    assert code != 0
    assert "0.8" in capsys.readouterr().err


def test_missing_file(tmp_path, capsys):
    code = main(["solve", "--data", str(tmp_path / "nope.txt"), "--density", "5"])
    assert code == 1
    assert "nope.txt" in capsys.readouterr().err


def test_parse_error(tmp_path, capsys):
    bad = tmp_path / "bad.txt"
    bad.write_text("3 5\n1 2 3\n")
    assert main(["solve", "--data", str(bad), "--density", "5"]) == 1
    assert "expected" in capsys.readouterr().err


def test_sweep_rows_sorted(data, tmp_path):
    out = tmp_path / "sweep.json"
    code = main(["sweep", "--data", str(data), "--densities", "7,5,6", "--seeds", "1,0",
                 "--out", str(out)])
    assert code == 0
    rows = json.loads(out.read_text())
    assert [(r["density"], r["seed"]) for r in rows] == [
        (5, 0), (5, 1), (6, 0), (6, 1), (7, 0), (7, 1)
    ]
    for r in rows:
        assert 0 < r["s_true"] <= r["density"]


def test_sweep_best(data, tmp_path):
    out = tmp_path / "best.csv"
    assert main(["sweep", "--data", str(data), "--densities", "5,6", "--seeds", "0,1,2",
                 "--best", "--out", str(out)]) == 0
    assert [r["density"] for r in read_csv(out)] == ["5", "6"]


def test_byte_identical_reruns(data, tmp_path):
    outs = []
    for i, workers in enumerate(("1", "2")):
        out = tmp_path / f"run{i}.csv"
        assert main(["sweep", "--data", str(data), "--densities", "5,8", "--seeds", "3,4",
                     "--no-timing", "--workers", workers, "--out", str(out)]) == 0
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]


def test_config_file(data, tmp_path):
    cfg = tmp_path / "run.json"
    out = tmp_path / "r.csv"
    cfg.write_text(json.dumps({"data": str(data), "densities": [5, 6], "seeds": [2],
                               "cap": 0.5, "max-iter": 50, "out": str(out)}))
    assert main(["sweep", "--config", str(cfg)]) == 0
    assert [r["density"] for r in read_csv(out)] == ["5", "6"]


def test_csv_input(tmp_path):
    rng = np.random.default_rng(1)
    path = tmp_path / "daily.csv"
    prices = 10 * np.cumprod(1 + rng.normal(0, 0.01, (30, 6)), axis=0)
    with path.open("w") as fh:
        fh.write("date,IDX,A,B,C,D,E\n")
        for t, row in enumerate(prices):
            fh.write(f"2013-01-{t + 1:02d}," + ",".join(f"{v:.5f}" for v in row) + "\n")
    out = tmp_path / "r.csv"
    assert main(["solve", "--data", str(path), "--format", "csv", "--index-column", "IDX",
                 "--density", "2", "--cap", "0.5", "--out", str(out)]) == 0
    assert read_csv(out)[0]["dataset"] == "daily"


def test_compare(tmp_path):
    ours = tmp_path / "ours.csv"
    ours.write_text(
        "dataset,density,tei,teo,s_true,runtime_seconds,seed\n"
        "hs,5,6.23e-05,5.17e-05,5,0.1,0\n"
        "hs,5,7.00e-05,4.00e-05,5,0.1,1\n"
    )
    ref = tmp_path / "ref.csv"
    ref.write_text("dataset,density,method,tei,teo\nhs,5,MIP,5.69e-5,8.87e-5\n")
    out = tmp_path / "cmp.csv"
    assert main(["compare", "--ours", str(ours), "--ref", str(ref), "--out", str(out)]) == 0
    row = read_csv(out)[0]
    assert float(row["supo"]) == pytest.approx(41.7, abs=0.1)
    assert float(row["cons"]) == pytest.approx(1.06e-5, abs=1e-7)


def test_module_entry_point(data):
    proc = subprocess.run(
        [sys.executable, "-m", "npgtrack", "solve", "--data", str(data), "--density", "5",
         "--no-timing"],
        capture_output=True, text=True, check=True,
    )
    lines = proc.stdout.strip().splitlines()
    assert lines[0].startswith("dataset,density,tei,teo,s_true,runtime_seconds")
    assert len(lines) == 2
