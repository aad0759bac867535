"""
Command line for cubic smoothing splines with discontinuities.

Usage:
    python -m src.main fit   data.csv --p 0.999 --gamma 5 [--grid 500 --grid-output grid.csv]
    python -m src.main auto  data.csv [--folds 5 --seed 0 --budget 60 --restarts 0]
    python -m src.main bench [--sizes 200 400 800 --runs 5]
    python -m src.main gen   --signal heavisine --n 200 --sigma 0.6 --seed 1

Results go to stdout (or --output); logs and errors go to stderr. Errors are
reported as one JSON object and mapped to exit codes 2 (usage), 3 (data) and
4 (numerical failure).
"""

import argparse
import json
import os
import sys
import tempfile
from datetime import datetime
from typing import List, Optional, Sequence

import numpy as np
import pandas as pd
from pydantic import ValidationError

from src.entity.report_entity import AutoReport, SolutionReport
from src.entity.series_entity import DataSeries, Hyperparams
from src.config.configurations import get_settings
from src.logs.logger_config import LoggerConfig, get_cli_logger
from src.state.state_manager import SearchStateManager
from src.tools.benchmark.runtime_scaling import run_benchmark, runtime_table
from src.tools.cssd import get_tool_info
from src.tools.cssd.model_selection import select_params_with_restarts
from src.tools.cssd.preprocess import bin_series, mesh_ratio, series_from_arrays
from src.tools.cssd.segment_fit import piece_coefficients
from src.tools.cssd.solver import evaluate_solution, solve_cssd
from src.tools.signals.synthetic import EQUIDISTANT, SIGNALS, UNIFORM, generate_series
from src.utils.exceptions import (
    CssdError,
    CssdNumericalError,
    InputFormatError,
    InvalidGamma,
    InvalidP,
    UsageError,
)

STDIO = "-"


class CliArgumentParser(argparse.ArgumentParser):
    """Argument parser that raises instead of exiting on bad flags."""

    def error(self, message: str):
        raise UsageError(message)


# ---------------------------------------------------------------------------
# Input / output
# ---------------------------------------------------------------------------

def read_series(path: str) -> DataSeries:
    """
    Read a CSV with columns x, y (or y1..yD) and an optional delta.

    Raises:
        InputFormatError: unreadable file, missing columns or non-numeric cells
    """
    try:
        frame = pd.read_csv(sys.stdin if path == STDIO else path)
    except (OSError, UnicodeDecodeError, pd.errors.ParserError, pd.errors.EmptyDataError) as exc:
        raise InputFormatError(f"cannot read {path!r}: {exc}") from exc

    frame.columns = [str(column).strip() for column in frame.columns]
    if "x" not in frame.columns:
        raise InputFormatError("input needs an 'x' column")
    if "y" in frame.columns:
        y_columns = ["y"]
    else:
        y_columns = sorted(
            (c for c in frame.columns if c.startswith("y") and c[1:].isdigit()),
            key=lambda c: int(c[1:]),
        )
        if not y_columns or y_columns != [f"y{k}" for k in range(1, len(y_columns) + 1)]:
            raise InputFormatError("input needs a 'y' column or columns 'y1', ..., 'yD'")

    try:
        numeric = frame[["x", *y_columns, *(["delta"] if "delta" in frame.columns else [])]].apply(
            pd.to_numeric, errors="raise"
        )
    except (ValueError, TypeError) as exc:
        raise InputFormatError(f"non-numeric cell in {path!r}: {exc}") from exc

    deltas = numeric["delta"].to_numpy(dtype=float) if "delta" in numeric.columns else None
    return series_from_arrays(
        numeric["x"].to_numpy(dtype=float), numeric[y_columns].to_numpy(dtype=float), deltas
    )


def write_text(text: str, path: Optional[str]) -> None:
    """Write to stdout, or atomically replace the file at path."""
    if path is None or path == STDIO:
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp_path = tempfile.mkstemp(dir=directory, prefix=".cssd-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)
        os.replace(tmp_path, path)
    except BaseException:
        if os.path.exists(tmp_path):
            os.remove(tmp_path)
        raise


def value_columns(dim: int) -> List[str]:
    return ["y"] if dim == 1 else [f"y{k}" for k in range(1, dim + 1)]


def frame_csv(xs: np.ndarray, ys: np.ndarray, deltas: Optional[np.ndarray] = None) -> str:
    ys = np.asarray(ys).reshape(len(xs), -1)
    frame = pd.DataFrame(ys, columns=value_columns(ys.shape[1]))
    frame.insert(0, "x", xs)
    if deltas is not None:
        frame["delta"] = deltas
    return frame.to_csv(index=False, float_format="%.17g", lineterminator="\n")


def dump_json(payload: dict) -> str:
    return json.dumps(payload, indent=2, allow_nan=False) + "\n"


def parse_params(p: float, gamma: str) -> Hyperparams:
    try:
        return Hyperparams(p=p, gamma=gamma)
    except (ValidationError, ValueError) as exc:
        if not 0.0 < p < 1.0:
            raise InvalidP(f"p must lie in (0, 1), got {p}") from exc
        raise InvalidGamma(f"gamma must be positive or 'inf', got {gamma!r}") from exc


def load_input(args: argparse.Namespace, state: Optional[SearchStateManager] = None) -> DataSeries:
    """Read the input series; mesh-ratio and binning notes also go to the search state."""
    logger = get_cli_logger()
    series = read_series(args.input)
    if series.n >= 2:
        ratio = mesh_ratio(series)
        threshold = get_settings().mesh_ratio_threshold
        if state is not None and ratio > threshold:
            state.add_warning(f"mesh ratio {ratio:.3g} exceeds {threshold:.3g}")
        if args.bin:
            sites = series.n
            series = bin_series(series)
            logger.info(f"Binned input from mesh ratio {ratio:.3g} to {series.n} sites")
            if state is not None and series.n < sites:
                state.add_warning(f"binned {sites} sites to {series.n}")
    logger.info(f"Loaded {series.n} sites with {series.dim} data dimension(s)")
    return series


def write_grid(solution, series: DataSeries, points: int, path: str) -> None:
    if points < 1:
        raise UsageError(f"--grid needs at least one point, got {points}")
    ts = np.linspace(series.xs[0], series.xs[-1], points)
    write_text(frame_csv(ts, evaluate_solution(solution, ts)), path)


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def command_fit(args: argparse.Namespace) -> dict:
    params = parse_params(args.p, args.gamma)
    series = load_input(args)
    solution = solve_cssd(series, params)
    report = SolutionReport.from_solution(solution, piece_coefficients)
    write_text(dump_json(report.to_json_dict()), args.output)
    if args.grid is not None:
        write_grid(solution, series, args.grid, args.grid_output)
    return {
        "params": params.as_dict(),
        "objective": solution.objective,
        "discontinuities": list(solution.discontinuities.locations),
    }


def command_auto(args: argparse.Namespace) -> dict:
    logger = get_cli_logger()
    start = parse_params(args.p0, args.gamma0)
    if args.budget < 1:
        raise UsageError(f"--budget must be at least 1, got {args.budget}")
    if args.restarts < 0:
        raise UsageError(f"--restarts must be non-negative, got {args.restarts}")
    state = SearchStateManager(args.budget)
    series = load_input(args, state)

    params, score = select_params_with_restarts(
        series, args.folds, args.seed, start, args.budget, args.restarts,
        state=state, threads=args.threads,
    )
    logger.info(f"Selected p={params.p} gamma={params.as_dict()['gamma']} with CV score {score:.6g}")

    solution = solve_cssd(series, params)
    report = AutoReport.from_solution(
        solution,
        piece_coefficients,
        cv_score=score,
        folds=args.folds,
        seed=args.seed,
        evaluations_used=state.evaluations_used,
        restarts=args.restarts,
    )
    write_text(dump_json(report.to_json_dict()), args.output)
    if args.grid is not None:
        write_grid(solution, series, args.grid, args.grid_output)
    return {"search": state.export_state(), "objective": solution.objective}


def command_bench(args: argparse.Namespace) -> dict:
    params = parse_params(args.p, args.gamma)
    results = run_benchmark(
        sizes=args.sizes, runs=args.runs, p=params.p, gamma=params.gamma, sigma=args.sigma, seed=args.seed
    )
    table = runtime_table(results)
    sys.stdout.write("Median runtime in seconds\n")
    sys.stdout.write(table.to_string(float_format=lambda v: f"{v:.4f}") + "\n")
    if args.output:
        write_text(results.to_csv(index=False, lineterminator="\n"), args.output)
    return {"results": results.to_dict(orient="records")}


def command_gen(args: argparse.Namespace) -> dict:
    series = generate_series(args.signal, args.n, args.sigma, args.seed, args.sites)
    write_text(frame_csv(series.xs, series.ys, series.deltas), args.output)
    return {"signal": args.signal, "n": series.n, "sigma": args.sigma, "seed": args.seed}


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def describe_operation(name: str) -> str:
    info = get_tool_info(name)
    return f"{info['description']}.\n\ninput:  {info['input']}\noutput: {info['output']}"


def _add_input_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("input", help="CSV file with columns x, y|y1..yD[, delta]; '-' reads stdin")
    parser.add_argument("--output", "-o", default=None, help="JSON output path (default: stdout)")
    parser.add_argument("--grid", type=int, default=None, metavar="M",
                        help="also evaluate the fit at M equidistant points")
    parser.add_argument("--grid-output", default=None, help="CSV path of the evaluation grid")
    parser.add_argument("--bin", action="store_true",
                        help="merge closest sites until the mesh ratio is below the threshold")


def build_parser() -> CliArgumentParser:
    parser = CliArgumentParser(prog="cssd", description="Cubic smoothing splines with discontinuities")
    commands = parser.add_subparsers(dest="command", parser_class=CliArgumentParser)
    commands.required = True

    fit = commands.add_parser("fit", help="solve for fixed p and gamma",
                              description=describe_operation("solve_cssd"),
                              formatter_class=argparse.RawDescriptionHelpFormatter)
    _add_input_flags(fit)
    fit.add_argument("--p", type=float, required=True, help="smoothing weight in (0, 1)")
    fit.add_argument("--gamma", required=True, help="jump penalty (> 0) or 'inf'")

    auto = commands.add_parser("auto", help="choose p and gamma by K-fold cross validation",
                               description=describe_operation("select_params"),
                               formatter_class=argparse.RawDescriptionHelpFormatter)
    _add_input_flags(auto)
    auto.add_argument("--folds", type=int, default=5)
    auto.add_argument("--seed", type=int, default=0)
    auto.add_argument("--budget", type=int, default=60, help="maximum number of CV evaluations")
    auto.add_argument("--restarts", type=int, default=0)
    auto.add_argument("--p0", type=float, default=0.99, help="starting p")
    auto.add_argument("--gamma0", default="1", help="starting gamma")
    auto.add_argument("--threads", type=int, default=None, help="fold-fit threads (capped by CSSD_THREADS)")

    bench = commands.add_parser("bench", help="runtime table for the HeaviSine scenarios")
    bench.add_argument("--sizes", type=int, nargs="+", default=[200, 400, 800])
    bench.add_argument("--runs", type=int, default=5)
    bench.add_argument("--p", type=float, default=0.9999)
    bench.add_argument("--gamma", default="20", help="jump penalty (> 0) or 'inf'")
    bench.add_argument("--sigma", type=float, default=0.6)
    bench.add_argument("--seed", type=int, default=0)
    bench.add_argument("--output", "-o", default=None, help="CSV path of the raw results")

    gen = commands.add_parser("gen", help="emit a synthetic test signal as CSV")
    gen.add_argument("--signal", choices=sorted(SIGNALS), default="heavisine")
    gen.add_argument("--n", type=int, default=200)
    gen.add_argument("--sigma", type=float, default=0.0)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--sites", choices=[EQUIDISTANT, UNIFORM], default=EQUIDISTANT)
    gen.add_argument("--output", "-o", default=None, help="CSV path (default: stdout)")
    return parser


COMMANDS = {
    "fit": command_fit,
    "auto": command_auto,
    "bench": command_bench,
    "gen": command_gen,
}


def emit_error(exc: BaseException, exit_code: int) -> int:
    payload = {"error": type(exc).__name__, "message": str(exc), "exit_code": exit_code}
    sys.stderr.write(json.dumps(payload) + "\n")
    return exit_code


def run(argv: Optional[Sequence[str]] = None) -> int:
    """
    Run the command line.

    Args:
        argv: arguments without the program name (default: sys.argv[1:])

    Returns:
        Exit code: 0 ok, 2 usage, 3 data error, 4 numerical error
    """
    logger = get_cli_logger()
    try:
        args = build_parser().parse_args(argv)
        if getattr(args, "grid", None) is not None and not args.grid_output:
            raise UsageError("--grid needs --grid-output")
        logger.info(f"Running command: {args.command}")
        summary = COMMANDS[args.command](args)
    except CssdError as exc:
        logger.error(f"{type(exc).__name__}: {exc}")
        return emit_error(exc, exc.exit_code)
    except ValidationError as exc:
        logger.error(f"Invalid data: {exc}")
        return emit_error(exc, 3)
    except (ArithmeticError, np.linalg.LinAlgError) as exc:
        logger.error(f"Numerical failure: {exc}")
        return emit_error(exc, CssdNumericalError.exit_code)

    run_id = datetime.now().strftime("%Y%m%d_%H%M%S_%f")
    LoggerConfig.log_run_summary({"command": args.command, **summary}, run_id)
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
