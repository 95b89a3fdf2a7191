"""Price ingestion, in/out-of-sample evaluation and comparison metrics."""

from __future__ import annotations

import csv
import json
import math
import sys
import time
from dataclasses import asdict, dataclass, fields
from pathlib import Path

import numpy as np

from .core import (
    SolverParams,
    SparseSimplexConstraint,
    TrackingProblem,
    ValidationError,
    validate_problem,
)
from .objective import TrackingError, te_value
from .solver import npg_solve, random_feasible_point

__all__ = [
    "DataFormatError",
    "PriceSeries",
    "EvaluationRow",
    "ROW_COLUMNS",
    "prices_to_returns",
    "split_train_test",
    "tracking_errors",
    "consistency",
    "superiority",
    "load_orlibrary",
    "load_csv_prices",
    "load_prices",
    "evaluate_density",
    "best_rows",
    "write_rows",
    "read_rows",
    "compare_rows",
    "write_table",
]


class DataFormatError(ValueError):
    """Malformed price file; the message carries the file position."""


@dataclass(frozen=True)
class PriceSeries:
    index_prices: np.ndarray
    asset_prices: np.ndarray
    labels: tuple[str, ...] | None = None
    name: str = ""

    def __post_init__(self):
        idx = np.asarray(self.index_prices, dtype=float)
        assets = np.asarray(self.asset_prices, dtype=float)
        if assets.ndim != 2 or idx.shape != (assets.shape[0],):
            raise ValidationError(
                f"index has {idx.shape} prices but assets have shape {assets.shape}",
                "index_prices",
            )
        if idx.shape[0] < 2:
            raise ValidationError("need at least two price observations", "index_prices")
        for label, arr in (("index_prices", idx), ("asset_prices", assets)):
            if not np.all(np.isfinite(arr)) or np.any(arr <= 0):
                raise ValidationError(f"{label} must be finite and strictly positive", label)
        if self.labels is not None and len(self.labels) != assets.shape[1]:
            raise ValidationError(
                f"{len(self.labels)} labels for {assets.shape[1]} assets", "labels"
            )
        object.__setattr__(self, "index_prices", idx)
        object.__setattr__(self, "asset_prices", assets)

    @property
    def asset_count(self) -> int:
        return self.asset_prices.shape[1]


ROW_COLUMNS = ("dataset", "density", "tei", "teo", "s_true", "runtime_seconds")


@dataclass(frozen=True)
class EvaluationRow:
    dataset: str
    density: int
    tei: float
    teo: float
    s_true: int
    runtime_seconds: float
    seed: int | None = None

    def __post_init__(self):
        if self.s_true > self.density:
            raise ValidationError(f"s_true {self.s_true} exceeds density {self.density}", "s_true")
        if not (self.tei >= 0 and self.teo >= 0):
            raise ValidationError("tracking errors must be nonnegative", "tei")


def prices_to_returns(prices: PriceSeries) -> TrackingProblem:
    """Simple returns ``p[t] / p[t-1] - 1`` for the index and every asset."""
    P = prices.asset_prices
    idx = prices.index_prices
    return TrackingProblem(
        returns=(P[1:] - P[:-1]) / P[:-1],
        index_returns=(idx[1:] - idx[:-1]) / idx[:-1],
    )


def split_train_test(problem: TrackingProblem) -> tuple[TrackingProblem, TrackingProblem]:
    """First half of the periods for training, the rest for testing.

    With an odd period count the extra period goes to training.
    """
    T = problem.period_count
    if T < 2:
        raise ValidationError(f"need at least 2 periods to split, got {T}", "returns")
    cut = (T + 1) // 2
    R, y = problem.returns, problem.index_returns
    return TrackingProblem(R[:cut], y[:cut]), TrackingProblem(R[cut:], y[cut:])


def tracking_errors(weights, train: TrackingProblem, test: TrackingProblem) -> tuple[float, float]:
    return te_value(train, weights), te_value(test, weights)


def consistency(tei: float, teo: float) -> float:
    return abs(tei - teo)


def superiority(teo_a: float, teo_b: float) -> float:
    """Percent reduction of out-of-sample error of A relative to B."""
    if teo_b == 0:
        raise ZeroDivisionError("superiority is undefined for a zero reference error")
    return (teo_b - teo_a) / teo_b * 100.0


# --- ingestion -------------------------------------------------------------


def _numeric_tokens(text: str, path) -> list[tuple[float, int]]:
    out = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        for tok in line.split():
            try:
                out.append((float(tok), lineno))
            except ValueError:
                raise DataFormatError(f"{path}:{lineno}: non-numeric token {tok!r}") from None
    return out


def load_orlibrary(path) -> PriceSeries:
    """Read an OR-library index tracking file.

    Layout (whitespace separated)::

        N T
        index price, one per period
        asset 1 prices, one per period
        ...
        asset N prices

    Each series holds either T or T + 1 prices (the files count periods
    from 0); both are accepted.
    """
    path = Path(path)
    tokens = _numeric_tokens(path.read_text(), path)
    if len(tokens) < 2:
        raise DataFormatError(f"{path}:1: missing header 'asset_count period_count'")
    (n_raw, line_n), (t_raw, line_t) = tokens[:2]
    if n_raw != int(n_raw) or n_raw < 1 or t_raw != int(t_raw) or t_raw < 1:
        raise DataFormatError(
            f"{path}:{line_n}: header must be two positive integers, got {n_raw:g} {t_raw:g}"
        )
    n, t = int(n_raw), int(t_raw)
    body = tokens[2:]
    for length in (t + 1, t):
        if len(body) == (n + 1) * length:
            break
    else:
        raise DataFormatError(
            f"{path}: expected {(n + 1) * (t + 1)} (or {(n + 1) * t}) price tokens after "
            f"the header for {n} assets and {t} periods, found {len(body)}"
        )
    values = np.array([v for v, _ in body])
    bad = np.flatnonzero(values <= 0)
    if bad.size:
        v, line = body[bad[0]]
        raise DataFormatError(
            f"{path}:{line}: nonpositive price {v:g} at token {bad[0] + 3}"
        )
    series = values.reshape(n + 1, length)
    return PriceSeries(series[0], series[1:].T, name=path.stem)


def _is_number(s: str) -> bool:
    try:
        float(s)
    except ValueError:
        return False
    return True


def load_csv_prices(path, index_column: str | int = 0) -> PriceSeries:
    """Read a price table with a header row of labels.

    A first column holding non-numeric entries (dates) is ignored.
    ``index_column`` is a label or a 0-based position among the price
    columns; every other price column is an asset.
    """
    path = Path(path)
    with path.open(newline="") as fh:
        rows = [row for row in csv.reader(fh) if any(cell.strip() for cell in row)]
    if len(rows) < 3:
        raise DataFormatError(f"{path}: need a header and at least two rows of prices")
    header = [h.strip() for h in rows[0]]
    data = rows[1:]
    for i, row in enumerate(data, start=2):
        if len(row) != len(header):
            raise DataFormatError(f"{path}:{i}: {len(row)} fields, header has {len(header)}")
    start = 0 if all(_is_number(row[0]) for row in data) else 1
    labels = header[start:]
    if isinstance(index_column, str) and not index_column.lstrip("-").isdigit():
        if index_column not in labels:
            raise DataFormatError(f"{path}: no price column named {index_column!r}")
        pos = labels.index(index_column)
    else:
        pos = int(index_column)
        if not 0 <= pos < len(labels):
            raise DataFormatError(f"{path}: index column {pos} out of range")
    values = np.empty((len(data), len(labels)))
    for i, row in enumerate(data):
        for j, cell in enumerate(row[start:]):
            try:
                values[i, j] = float(cell)
            except ValueError:
                raise DataFormatError(
                    f"{path}:{i + 2}: column {labels[j]!r} has non-numeric value {cell!r}"
                ) from None
    bad = np.argwhere(values <= 0)
    if bad.size:
        i, j = bad[0]
        raise DataFormatError(f"{path}:{i + 2}: nonpositive price in column {labels[j]!r}")
    assets = [j for j in range(len(labels)) if j != pos]
    return PriceSeries(
        values[:, pos],
        values[:, assets],
        labels=tuple(labels[j] for j in assets),
        name=path.stem,
    )


def load_prices(path, fmt: str = "orlib", index_column: str | int = 0) -> PriceSeries:
    if fmt == "orlib":
        return load_orlibrary(path)
    if fmt == "csv":
        return load_csv_prices(path, index_column)
    raise ValueError(f"unknown format {fmt!r}")


# --- experiment runs ---------------------------------------------------------


def evaluate_density(
    prices: PriceSeries,
    density: int,
    cap: float,
    params: SolverParams,
    seeds=(0,),
    dataset: str | None = None,
) -> list[EvaluationRow]:
    """Solve on the training half once per seed and score both halves.

    ``runtime_seconds`` covers the solve only.
    """
    problem = prices_to_returns(prices)
    train, test = split_train_test(problem)
    constraint = SparseSimplexConstraint(density, cap, problem.asset_count)
    validate_problem(train, constraint)
    objective = TrackingError(train)
    rows = []
    for seed in seeds:
        x0 = random_feasible_point(constraint, seed)
        tic = time.perf_counter()
        result = npg_solve(objective, constraint, params, x0)
        elapsed = time.perf_counter() - tic
        tei, teo = tracking_errors(result.weights, train, test)
        rows.append(
            EvaluationRow(
                dataset=dataset or prices.name,
                density=density,
                tei=tei,
                teo=teo,
                s_true=int(np.count_nonzero(result.weights)),
                runtime_seconds=elapsed,
                seed=seed,
            )
        )
    return rows


def best_rows(rows) -> list[EvaluationRow]:
    """Lowest-TEI row per (dataset, density); ties go to the smaller seed."""
    best: dict[tuple[str, int], EvaluationRow] = {}
    for row in sorted(rows, key=_row_key):
        key = (row.dataset, row.density)
        if key not in best or row.tei < best[key].tei:
            best[key] = row
    return [best[k] for k in sorted(best)]


def _row_key(row: EvaluationRow):
    return (row.dataset, row.density, -1 if row.seed is None else row.seed)


_ROW_FIELDS = [f.name for f in fields(EvaluationRow)]


def write_table(records: list[dict], path=None, fmt: str = "csv", columns=None) -> None:
    """Write dicts as CSV or JSON with a fixed column order.

    ``path`` of ``None`` or ``"-"`` writes to stdout.
    """
    columns = list(columns or (records[0].keys() if records else ()))
    if fmt not in ("csv", "json"):
        raise ValueError(f"unknown output format {fmt!r}")
    if path is None or str(path) == "-":
        _dump(records, sys.stdout, fmt, columns)
    else:
        with Path(path).open("w", newline="") as fh:
            _dump(records, fh, fmt, columns)


def _dump(records, fh, fmt, columns):
    if fmt == "json":
        payload = [{c: rec.get(c) for c in columns} for rec in records]
        fh.write(json.dumps(payload, indent=2) + "\n")
        return
    writer = csv.DictWriter(fh, fieldnames=columns, lineterminator="\n")
    writer.writeheader()
    for rec in records:
        writer.writerow({c: _csv_cell(rec.get(c)) for c in columns})


def _csv_cell(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return v


def write_rows(rows, path=None, fmt: str = "csv") -> None:
    rows = sorted(rows, key=_row_key)
    write_table([asdict(r) for r in rows], path, fmt, columns=_ROW_FIELDS)


def read_rows(path) -> list[EvaluationRow]:
    """Read rows written by :func:`write_rows` (format from the suffix)."""
    path = Path(path)
    if path.suffix.lower() == ".json":
        records = json.loads(path.read_text())
    else:
        with path.open(newline="") as fh:
            records = list(csv.DictReader(fh))
    rows = []
    for rec in records:
        seed = rec.get("seed")
        rows.append(
            EvaluationRow(
                dataset=str(rec["dataset"]),
                density=int(rec["density"]),
                tei=float(rec["tei"]),
                teo=float(rec["teo"]),
                s_true=int(rec["s_true"]),
                runtime_seconds=float(rec["runtime_seconds"]),
                seed=None if seed in (None, "") else int(seed),
            )
        )
    return rows


COMPARE_COLUMNS = (
    "dataset", "density", "method", "tei", "teo", "ref_tei", "ref_teo",
    "cons", "ref_cons", "supo",
)


def compare_rows(ours, reference: list[dict]) -> list[dict]:
    """Cons and SupO of our best rows against published reference results.

    ``reference`` records need ``dataset``, ``density`` and ``teo``;
    ``tei`` and ``method`` are optional.  Cells without a matching row of
    ours are skipped.
    """
    mine = {(r.dataset, r.density): r for r in best_rows(ours)}
    out = []
    for ref in reference:
        key = (str(ref["dataset"]), int(ref["density"]))
        if key not in mine:
            continue
        row = mine[key]
        ref_teo = float(ref["teo"])
        ref_tei = _optional_float(ref.get("tei"))
        out.append(
            {
                "dataset": key[0],
                "density": key[1],
                "method": ref.get("method") or "reference",
                "tei": row.tei,
                "teo": row.teo,
                "ref_tei": ref_tei,
                "ref_teo": ref_teo,
                "cons": consistency(row.tei, row.teo),
                "ref_cons": None if ref_tei is None else consistency(ref_tei, ref_teo),
                "supo": superiority(row.teo, ref_teo) if ref_teo > 0 else math.nan,
            }
        )
    out.sort(key=lambda d: (d["dataset"], d["density"], d["method"]))
    return out


def _optional_float(v):
    return None if v in (None, "") else float(v)
