"""Command line front end.

    npgtrack solve   --data indtrack1.txt --density 10 --cap 0.5 --seed 7 --out result.csv
    npgtrack sweep   --data indtrack1.txt --densities 5,6,7,8,9,10 --seeds 0,1,2,3,4
    npgtrack compare --ours result.csv --ref published.csv

Any flag can also come from ``--config run.json`` whose keys are the flag
names with dashes replaced by underscores; explicit flags win.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path

from .core import SolverParams, ValidationError
from .experiments import (
    COMPARE_COLUMNS,
    DataFormatError,
    best_rows,
    compare_rows,
    evaluate_density,
    load_prices,
    read_rows,
    write_rows,
    write_table,
)
from .solver import SolverError

logger = logging.getLogger("npgtrack")

# above this many assets the longer objective memory is used
LARGE_SET = 300


@dataclass(frozen=True)
class RunConfig:
    data_path: Path
    format: str
    densities: tuple[int, ...]
    cap: float
    params: SolverParams
    seeds: tuple[int, ...]
    output_path: Path | None
    output_format: str
    index_column: str | int = 0
    memory: int | None = None
    workers: int = 1
    best_only: bool = False
    timing: bool = True

    def __post_init__(self):
        if not self.densities:
            raise ValidationError("at least one density is required", "densities")
        if min(self.densities) < 1:
            raise ValidationError("densities must be at least 1", "densities")
        if self.cap * min(self.densities) < 1:
            raise ValidationError(
                f"infeasible: cap * density = {self.cap * min(self.densities):g} < 1", "cap"
            )
        if not self.seeds:
            raise ValidationError("at least one seed is required", "seeds")


def _int_list(text) -> tuple[int, ...]:
    if isinstance(text, (list, tuple)):
        return tuple(int(v) for v in text)
    if isinstance(text, int):
        return (text,)
    try:
        return tuple(int(v) for v in str(text).split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma separated integers, got {text!r}")


def _add_run_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--data", help="price file")
    p.add_argument("--format", choices=("orlib", "csv"), default="orlib")
    p.add_argument("--index-column", default="0",
                   help="csv only: name or 0-based position of the index column")
    p.add_argument("--cap", type=float, default=0.5, help="per-asset weight cap u")
    p.add_argument("--memory", type=int, default=None,
                   help="nonmonotone memory M (default 3, or 5 for >= 300 assets)")
    p.add_argument("--tol", type=float, default=1e-6, help="step tolerance")
    p.add_argument("--max-iter", type=int, default=10_000)
    p.add_argument("--out", default=None, help="output file (default stdout)")
    p.add_argument("--out-format", choices=("csv", "json"), default=None)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--no-timing", action="store_true",
                   help="report runtime_seconds as 0 so repeated runs are byte-identical")
    p.add_argument("--config", default=None, help="JSON file with default flag values")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="npgtrack", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    solve = sub.add_parser("solve", help="one density, one or more seeds")
    _add_run_flags(solve)
    solve.add_argument("--density", type=int, default=None)
    solve.add_argument("--seed", type=int, default=0)
    solve.add_argument("--seeds", type=_int_list, default=None)

    sweep = sub.add_parser("sweep", help="several densities and seeds")
    _add_run_flags(sweep)
    sweep.add_argument("--densities", type=_int_list, default=None)
    sweep.add_argument("--seeds", type=_int_list, default=(0,))
    sweep.add_argument("--best", action="store_true",
                       help="keep only the lowest-TEI seed per density")

    compare = sub.add_parser("compare", help="Cons and SupO against reference results")
    compare.add_argument("--ours", required=True)
    compare.add_argument("--ref", required=True)
    compare.add_argument("--out", default=None)
    compare.add_argument("--out-format", choices=("csv", "json"), default=None)
    parser.subcommands = {"solve": solve, "sweep": sweep, "compare": compare}
    return parser


def _apply_config(parser, argv, args):
    if getattr(args, "config", None) is None:
        return args
    cfg = json.loads(Path(args.config).read_text())
    if not isinstance(cfg, dict):
        raise ValidationError("config must be a JSON object", "config")
    parser.subcommands[args.command].set_defaults(**{k.replace("-", "_"): v for k, v in cfg.items()})
    return parser.parse_args(argv)


def _out_format(out, explicit):
    if explicit:
        return explicit
    return "json" if out and str(out).lower().endswith(".json") else "csv"


def config_from_args(args) -> RunConfig:
    if not args.data:
        raise ValidationError("--data is required", "data")
    if args.command == "solve":
        if args.density is None:
            raise ValidationError("--density is required", "density")
        densities = (args.density,)
        seeds = _int_list(args.seeds) if args.seeds is not None else (args.seed,)
        best = False
    else:
        if not args.densities:
            raise ValidationError("--densities is required", "densities")
        densities = _int_list(args.densities)
        seeds = _int_list(args.seeds)
        best = args.best
    index_column = args.index_column
    if isinstance(index_column, str) and index_column.lstrip("-").isdigit():
        index_column = int(index_column)
    params = SolverParams(
        memory=3 if args.memory is None else args.memory,
        step_tol=args.tol,
        max_iter=args.max_iter,
    )
    return RunConfig(
        data_path=Path(args.data),
        format=args.format,
        densities=densities,
        cap=args.cap,
        params=params,
        seeds=seeds,
        output_path=None if args.out is None else Path(args.out),
        output_format=_out_format(args.out, args.out_format),
        index_column=index_column,
        memory=args.memory,
        workers=max(1, args.workers),
        best_only=best,
        timing=not args.no_timing,
    )


def run(config: RunConfig):
    """Ingest, solve each (density, seed) on the training half and score it."""
    prices = load_prices(config.data_path, config.format, config.index_column)
    params = config.params
    if config.memory is None and prices.asset_count >= LARGE_SET:
        params = replace(params, memory=5)
    cells = [(prices, d, config.cap, params, config.seeds) for d in config.densities]
    if config.workers > 1 and len(cells) > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            chunks = list(pool.map(_run_cell, cells))
    else:
        chunks = [_run_cell(cell) for cell in cells]
    rows = [row for chunk in chunks for row in chunk]
    if config.best_only:
        rows = best_rows(rows)
    if not config.timing:
        rows = [replace(r, runtime_seconds=0.0) for r in rows]
    return rows


def _run_cell(cell):
    prices, density, cap, params, seeds = cell
    return evaluate_density(prices, density, cap, params, seeds)


def _read_reference(path) -> list[dict]:
    path = Path(path)
    if path.suffix.lower() == ".json":
        return json.loads(path.read_text())
    with path.open(newline="") as fh:
        return list(csv.DictReader(fh))


def main(argv=None) -> int:
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        args = _apply_config(parser, argv, args)
        if args.command == "compare":
            table = compare_rows(read_rows(args.ours), _read_reference(args.ref))
            write_table(table, args.out, _out_format(args.out, args.out_format), COMPARE_COLUMNS)
            return 0
        config = config_from_args(args)
        rows = run(config)
        write_rows(rows, config.output_path, config.output_format)
    except ValidationError as exc:
        print(f"npgtrack: invalid input: {exc}", file=sys.stderr)
        return 2
    except (OSError, DataFormatError, KeyError, ValueError) as exc:
        print(f"npgtrack: {exc}", file=sys.stderr)
        return 1
    except SolverError as exc:
        print(f"npgtrack: solver failed at {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
