#!/usr/bin/env python3
"""Benchmark harness: run methods over the problem registry, write the
results and compute Dolan-More performance profiles.

    bench.py run --methods smcg_pr1,hs --problems all --out results.csv
    bench.py profile --inputs results.csv --metric ng --out profile.csv
    bench.py check
"""
import asyncio
import argparse
import csv
import json
import logging
import math
import sys
import unittest
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, fields, replace
from functools import partial
from pathlib import Path
from typing import Any, Callable, Iterable, Optional, Sequence

from baselines import BetaKind, run_baseline
from model_core import (
    ConfigError,
    DomainError,
    EmitError,
    RunStatus,
    SolverParams,
    Variant,
    load_params,
    params_from_mapping,
)
from problems import ProblemSpec, get_problem, problem_names
from smcg_protocols import ObjectiveProbe, Vector
from solver import RunRecord, TraceRow, run, verify_trace

CSV_COLUMNS = (
    "problem", "n", "method", "status", "iters", "nf", "ng",
    "time_s", "final_f", "final_gnorm",
)
PROFILE_COLUMNS = ("tau", "method", "rho")
METRICS = {"iters": "iters", "nf": "n_f", "ng": "n_g", "time": "time_s"}
# smallest denominator of a performance ratio
COST_FLOOR = {"iters": 1.0, "nf": 1.0, "ng": 1.0, "time": 1e-6}

Runner = Callable[[ObjectiveProbe, Vector, SolverParams, bool], RunRecord]


def _smcg(
        name: str,
        variant: Optional[Variant] = None,
        p: Optional[float] = None,
) -> Runner:
    def runner(probe, x0, params, trace):
        changes: dict[str, Any] = {}
        if variant is not None:
            changes["variant"] = variant
        if p is not None:
            changes["p"] = p
        return run(probe, x0, replace(params, **changes), trace, method=name)

    return runner


def _baseline(kind: BetaKind) -> Runner:
    def runner(probe, x0, params, trace):
        return run_baseline(probe, x0, kind, params, trace)

    return runner


METHODS: dict[str, Runner] = {
    "smcg": _smcg("smcg"),
    "smcg_pr1": _smcg("smcg_pr1", Variant.PR1),
    "smcg_pr2": _smcg("smcg_pr2", Variant.PR2),
    "smcg_pr1_p3": _smcg("smcg_pr1_p3", Variant.PR1, 3.0),
    "smcg_pr1_p4": _smcg("smcg_pr1_p4", Variant.PR1, 4.0),
    "smcg_pr2_p3": _smcg("smcg_pr2_p3", Variant.PR2, 3.0),
    "smcg_pr2_p4": _smcg("smcg_pr2_p4", Variant.PR2, 4.0),
    **{kind.value.lower(): _baseline(kind) for kind in BetaKind},
}


@dataclass
class SuiteConfig:
    """Which methods run on which problems, and with what parameters"""

    methods: list[str]
    problems: list[str]
    params: SolverParams = field(default_factory=SolverParams)
    dims: dict[str, int] = field(default_factory=dict)
    trace: bool = False
    jobs: int = 1

    def resolve(self) -> tuple[list[str], list[ProblemSpec]]:
        """Check every name, expanding "all" to the whole registry"""
        unknown = [m for m in self.methods if m not in METHODS]
        if unknown:
            raise ConfigError(f"Unknown method(s): {', '.join(unknown)}")
        if not self.methods:
            raise ConfigError("No methods given")
        names = problem_names() if self.problems == ["all"] else self.problems
        if not names:
            raise ConfigError("No problems given")
        dims = {name.upper(): dim for name, dim in self.dims.items()}
        specs = [get_problem(name, dims.get(name.upper())) for name in names]
        if self.jobs < 1:
            raise ConfigError(f"jobs must be positive, got {self.jobs}")
        return list(self.methods), specs


def reference_ratio(record: RunRecord, spec: ProblemSpec) -> Optional[float]:
    """Iterations over the published SMCG_PR1 count; None when either is missing"""
    if spec.reference is None or record.status is not RunStatus.CONVERGED:
        return None
    return record.iters / spec.reference[0]


def run_pair(
        method: str,
        spec: ProblemSpec,
        params: SolverParams,
        trace: bool = False,
) -> RunRecord:
    """One method on one problem"""
    record = METHODS[method](spec.probe(), spec.x0(), params, trace)
    logging.info(
        "%s on %s (n=%d): %s, %d iterations, nf=%d, ng=%d",
        method, spec.name, spec.dim, record.status.value,
        record.iters, record.n_f, record.n_g,
    )
    ratio = reference_ratio(record, spec)
    if ratio is not None:
        logging.info("%s on %s: %.2f times the published iteration count",
                     method, spec.name, ratio)
    return record


async def run_suite(config: SuiteConfig) -> list[RunRecord]:
    """Run every (method, problem) pair, rows in config order.

    All names are checked before the first run starts.
    """
    methods, specs = config.resolve()
    params = config.params.validate()
    loop = asyncio.get_running_loop()
    with ThreadPoolExecutor(max_workers=config.jobs) as pool:
        pending = [
            loop.run_in_executor(
                pool, partial(run_pair, method, spec, params, config.trace)
            )
            for method in methods
            for spec in specs
        ]
        return list(await asyncio.gather(*pending))


@dataclass(frozen=True)
class ProfileTable:
    """rho[s][i] is the fraction of problems solver s solves within
    tau_grid[i] times the best cost"""

    metric: str
    tau_grid: list[float]
    rho: dict[str, list[float]]


@dataclass(frozen=True)
class ProfileSummary:
    solved: float
    wins: float


def _cost(record: RunRecord, metric: str) -> float:
    if record.status is not RunStatus.CONVERGED:
        return math.inf
    return float(getattr(record, METRICS[metric]))


def performance_profile(
        records: Iterable[RunRecord],
        metric: str,
        tau_grid: Optional[Sequence[float]] = None,
) -> ProfileTable:
    """Dolan-More profiles; failed runs cost +inf.

    Ratios divide by the best cost floored at COST_FLOOR[metric]. The
    default grid holds every finite performance ratio.
    """
    if metric not in METRICS:
        raise ConfigError(f"Unknown metric {metric!r}, use one of {', '.join(METRICS)}")
    costs: dict[tuple[str, int], dict[str, float]] = {}
    solvers: list[str] = []
    for record in records:
        if record.method not in solvers:
            solvers.append(record.method)
        costs.setdefault((record.problem, record.n), {})[record.method] = _cost(
            record, metric
        )
    if len(solvers) < 2 or not costs:
        raise DomainError("A profile needs at least two solvers and one problem")

    ratios: dict[str, list[float]] = {s: [] for s in solvers}
    for per_solver in costs.values():
        best = min(per_solver.get(s, math.inf) for s in solvers)
        for s in solvers:
            cost = per_solver.get(s, math.inf)
            if math.isinf(cost):
                ratios[s].append(math.inf)
            elif cost == best:
                ratios[s].append(1.0)
            else:
                ratios[s].append(max(1.0, cost / max(best, COST_FLOOR[metric])))

    if tau_grid is None:
        tau_grid = sorted(
            {r for values in ratios.values() for r in values if math.isfinite(r)}
        )
    grid = [float(tau) for tau in tau_grid]
    if any(tau < 1 for tau in grid) or grid != sorted(grid):
        raise DomainError("tau_grid must be ascending and >= 1")
    n_problems = len(costs)
    rho = {
        s: [sum(r <= tau for r in ratios[s]) / n_problems for tau in grid]
        for s in solvers
    }
    return ProfileTable(metric=metric, tau_grid=grid, rho=rho)


def profile_summary(table: ProfileTable) -> dict[str, ProfileSummary]:
    """Fraction of problems solved and fraction won, per solver"""
    summary = {}
    for solver, curve in table.rho.items():
        solved = curve[-1] if curve else 0.0
        wins = curve[0] if table.tau_grid and table.tau_grid[0] == 1.0 else 0.0
        summary[solver] = ProfileSummary(solved=solved, wins=wins)
    return summary


def _record_row(record: RunRecord) -> list[str]:
    return [
        record.problem,
        str(record.n),
        record.method,
        record.status.value,
        str(record.iters),
        str(record.n_f),
        str(record.n_g),
        repr(record.time_s),
        repr(record.final_f),
        repr(record.final_gnorm_inf),
    ]


def _record_mapping(record: RunRecord) -> dict[str, Any]:
    out = {f.name: getattr(record, f.name) for f in fields(record) if f.name != "trace"}
    out["status"] = record.status.value
    return out


def _write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence[str]]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def emit(
        data: Sequence[RunRecord] | ProfileTable,
        path: str | Path,
        fmt: Optional[str] = None,
) -> None:
    """Write run records or a profile as CSV or JSON.

    The format defaults to the file suffix, CSV unless it is ".json".
    """
    path = Path(path)
    fmt = fmt or ("json" if path.suffix.lower() == ".json" else "csv")
    if fmt not in ("csv", "json"):
        raise ConfigError(f"Unknown output format {fmt!r}")
    try:
        if isinstance(data, ProfileTable):
            if fmt == "csv":
                _write_csv(
                    path,
                    PROFILE_COLUMNS,
                    (
                        [repr(tau), solver, repr(curve[i])]
                        for i, tau in enumerate(data.tau_grid)
                        for solver, curve in data.rho.items()
                    ),
                )
            else:
                with open(path, "w", encoding="utf-8") as fh:
                    json.dump(asdict(data), fh, indent=2)
        elif fmt == "csv":
            _write_csv(path, CSV_COLUMNS, (_record_row(r) for r in data))
        else:
            with open(path, "w", encoding="utf-8") as fh:
                json.dump([_record_mapping(r) for r in data], fh, indent=2)
    except OSError as exc:
        raise EmitError(f"Cannot write {path}: {exc}") from exc
    logging.debug("Wrote %s", path)


def emit_trace(records: Sequence[RunRecord], path: str | Path) -> None:
    """One CSV row per iteration of every traced run"""
    columns = [f.name for f in fields(TraceRow)]
    rows = (
        [record.problem, record.method]
        + [
            row.dir_kind.value if name == "dir_kind" else repr(getattr(row, name))
            for name in columns
        ]
        for record in records
        for row in record.trace
    )
    try:
        _write_csv(Path(path), ["problem", "method", *columns], rows)
    except OSError as exc:
        raise EmitError(f"Cannot write {path}: {exc}") from exc


def _record_from_csv(row: dict[str, str]) -> RunRecord:
    return RunRecord(
        problem=row["problem"],
        n=int(row["n"]),
        method=row["method"],
        status=RunStatus(row["status"]),
        iters=int(row["iters"]),
        n_f=int(row["nf"]),
        n_g=int(row["ng"]),
        time_s=float(row["time_s"]),
        final_f=float(row["final_f"]),
        final_gnorm_inf=float(row["final_gnorm"]),
    )


def _record_from_json(item: dict[str, Any]) -> RunRecord:
    return RunRecord(**{**item, "status": RunStatus(item["status"])})


def read_records(path: str | Path) -> list[RunRecord]:
    """Parse a results file written by emit"""
    path = Path(path)
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            if path.suffix.lower() == ".json":
                return [_record_from_json(item) for item in json.load(fh)]
            reader = csv.DictReader(fh)
            if tuple(reader.fieldnames or ()) != CSV_COLUMNS:
                raise ConfigError(f"{path} does not have the result columns")
            return [_record_from_csv(row) for row in reader]
    except OSError as exc:
        raise ConfigError(f"Cannot read {path}: {exc}") from exc
    except (KeyError, TypeError, ValueError, json.JSONDecodeError) as exc:
        raise ConfigError(f"Malformed results file {path}: {exc}") from exc


def _split(value: str) -> list[str]:
    return [item.strip() for item in value.split(",") if item.strip()]


def _parse_dims(values: Sequence[str]) -> dict[str, int]:
    dims = {}
    for value in values:
        name, _, dim = value.partition("=")
        try:
            dims[name] = int(dim)
        except ValueError as exc:
            raise ConfigError(f"Bad dimension override {value!r}, use NAME=N") from exc
    return dims


def params_from_args(args: argparse.Namespace) -> SolverParams:
    """The --config file first, then the explicit flags"""
    params = load_params(args.config) if args.config else SolverParams()
    overrides: dict[str, Any] = {}
    if args.p is not None:
        overrides["p"] = args.p
    if args.variant is not None:
        overrides["variant"] = args.variant
    if args.tol is not None:
        overrides["eps"] = args.tol
    if args.max_iter is not None:
        overrides["max_iter"] = args.max_iter
    return params_from_mapping(overrides, params)


async def command_run(args: argparse.Namespace) -> int:
    config = SuiteConfig(
        methods=_split(args.methods),
        problems=_split(args.problems),
        params=params_from_args(args),
        dims=_parse_dims(args.dim),
        trace=args.trace,
        jobs=args.jobs,
    )
    records = await run_suite(config)
    emit(records, args.out, args.format)
    if args.trace:
        out = Path(args.out)
        emit_trace(records, out.with_name(out.name + ".trace.csv"))
        for record in records:
            for violation in verify_trace(record, config.params):
                logging.warning("%s on %s: %s", record.method, record.problem, violation)
    solved = sum(r.status is RunStatus.CONVERGED for r in records)
    logging.info("%d of %d runs converged", solved, len(records))
    return 0


def command_profile(args: argparse.Namespace) -> int:
    records = [record for path in args.inputs for record in read_records(path)]
    table = performance_profile(records, args.metric)
    emit(table, args.out, args.format)
    for solver, summary in profile_summary(table).items():
        logging.info("%s: solves %.1f%%, wins %.1f%%",
                     solver, 100 * summary.solved, 100 * summary.wins)
    return 0


def command_check() -> int:
    suite = unittest.TestLoader().discover(
        str(Path(__file__).resolve().parent), pattern="*_tests.py"
    )
    result = unittest.TextTestRunner(verbosity=1).run(suite)
    return 0 if result.wasSuccessful() else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument(
        "-v", "--verbose", action="store_true", default=False, help="Be verbose"
    )
    commands = parser.add_subparsers(dest="command", required=True)

    run_parser = commands.add_parser("run", help="Run methods over problems")
    run_parser.add_argument(
        "--methods", default="smcg_pr1", help=f"Comma-separated, from: {', '.join(METHODS)}"
    )
    run_parser.add_argument(
        "--problems", default="all", help="Comma-separated problem names or 'all'"
    )
    run_parser.add_argument("--p", type=float, default=None, help="Regularization power")
    run_parser.add_argument(
        "--variant", choices=("pr1", "pr2"), default=None, help="SMCG_PR variant"
    )
    run_parser.add_argument("--tol", type=float, default=None, help="Gradient tolerance")
    run_parser.add_argument("--max-iter", type=int, default=None, help="Iteration cap")
    run_parser.add_argument("--config", default=None, help="JSON parameter file")
    run_parser.add_argument(
        "--dim", action="append", default=[], help="Dimension override NAME=N"
    )
    run_parser.add_argument("--jobs", type=int, default=1, help="Parallel runs")
    run_parser.add_argument("--out", required=True, help="Results file")
    run_parser.add_argument("--format", choices=("csv", "json"), default=None)
    run_parser.add_argument(
        "--trace", action="store_true", default=False, help="Write per-iteration traces"
    )

    profile_parser = commands.add_parser("profile", help="Performance profiles")
    profile_parser.add_argument("--inputs", nargs="+", required=True)
    profile_parser.add_argument("--metric", choices=tuple(METRICS), default="ng")
    profile_parser.add_argument("--out", required=True)
    profile_parser.add_argument("--format", choices=("csv", "json"), default=None)

    commands.add_parser("check", help="Run the test suite")
    return parser


async def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    if args.verbose:
        logging.basicConfig(level=logging.DEBUG)
    else:
        logging.basicConfig(level=logging.INFO)
    try:
        match args.command:
            case "run":
                return await command_run(args)
            case "profile":
                return command_profile(args)
            case _:
                return command_check()
    except (ConfigError, DomainError) as exc:
        logging.error("%s", exc)
        return 2
    except EmitError as exc:
        logging.error("%s", exc)
        return 1


if __name__ == "__main__":
    try:
        sys.exit(asyncio.run(main()))
    except KeyboardInterrupt:
        pass
