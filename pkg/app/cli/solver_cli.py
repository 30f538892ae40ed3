"""CLI for solving POMDP models and evaluating the resulting policies."""

import re
from pathlib import Path
from typing import NoReturn

import numpy as np
import polars as pl
import typer
from loguru import logger
from pydantic import ValidationError

from app.cli.models import Algorithm, RunConfig
from app.config import config
from app.exceptions import PomdpError
from app.improve.point_based import ImproveConfig
from app.logging_setup import setup_logging
from app.model.parser import load_pomdp
from app.model.pomdp import Belief, Pomdp, shift_rewards, with_discount
from app.policy.simulation import simulate
from app.solver.trace import TRACE_COLUMNS
from app.solver.value_iteration import SolveLimits, SolveResult, vi, vi1
from app.vectors.alpha import offset_vectors
from app.vectors.io import read_alpha_file, write_alpha_file

EXIT_CONVERGED = 0
EXIT_FAILURE = 1
EXIT_CAPPED = 2

app = typer.Typer(
    name="pomdp-solve",
    help="Exact POMDP value iteration with point-based improvement",
    no_args_is_help=True,
)


@app.callback()
def main(
    log_level: str | None = typer.Option(None, "--log-level", help="Override LOGGING__LEVEL"),
    json_logs: bool = typer.Option(False, "--json-logs", help="Emit JSON log lines"),
) -> None:
    """Configure logging before any command runs."""
    setup_logging(level=log_level, json_format=json_logs or None)


def _fail(message: str) -> NoReturn:
    logger.error(message)
    typer.echo(f"Error: {message}", err=True)
    raise typer.Exit(code=EXIT_FAILURE)


def _run_config(**fields: object) -> RunConfig:
    try:
        return RunConfig(**{k: v for k, v in fields.items() if v is not None})  # type: ignore[arg-type]
    except ValidationError as e:
        _fail(f"invalid arguments: {e}")


def _load(path: Path, discount: float | None) -> Pomdp:
    """Parse, apply the discount override and shift rewards to be nonnegative."""
    try:
        model = load_pomdp(path)
    except (PomdpError, OSError) as e:
        _fail(f"{path}: {e}")
    if discount is not None:
        model = with_discount(model, discount)
    shifted = shift_rewards(model)
    if shifted.shift_offset:
        typer.echo(f"Rewards shifted by C = {shifted.shift_offset:g}")
    return shifted


def _solve(model: Pomdp, run: RunConfig, algorithm: Algorithm) -> SolveResult:
    limits = SolveLimits(
        max_iterations=run.max_iterations, time_limit_seconds=run.time_limit_seconds
    )
    try:
        if algorithm is Algorithm.VI:
            return vi(model, run.epsilon, limits=limits)
        improve_config = ImproveConfig(epsilon=run.epsilon, epsilon1=run.epsilon1)
        return vi1(model, run.epsilon, config=improve_config, limits=limits)
    except PomdpError as e:
        _fail(str(e))


def _summary(result: SolveResult, model: Pomdp) -> None:
    status = "converged" if result.converged else "stopped at cap"
    typer.echo(f"{result.algorithm}: {status}")
    typer.echo(f"  Iterations:       {result.iterations}")
    typer.echo(f"  Time (s):         {result.seconds:.3f}")
    typer.echo(f"  Epsilon achieved: {result.epsilon_achieved:.6g}")
    typer.echo(f"  Vectors:          {len(result.value_function)}")
    typer.echo(f"  Shift offset C:   {model.shift_offset:g}")


def _parse_belief(text: str, model: Pomdp) -> Belief:
    try:
        probs = np.array([float(token) for token in re.split(r"[,\s]+", text.strip())])
        if probs.size != model.n_states:
            _fail(f"belief has {probs.size} entries, model has {model.n_states} states")
        return Belief(probs)
    except (ValueError, PomdpError) as e:
        _fail(f"invalid belief {text!r}: {e}")


@app.command("solve")
def solve(
    model_path: Path = typer.Argument(..., help="Model file in .POMDP format"),  # noqa: B008
    algorithm: Algorithm = typer.Option(Algorithm.VI1, "--algorithm", "-a"),  # noqa: B008
    epsilon: float | None = typer.Option(None, "--epsilon", help="Target optimality"),
    epsilon1: float | None = typer.Option(None, "--epsilon1", help="Improve stop factor"),
    discount: float | None = typer.Option(None, "--discount", help="Override model discount"),
    max_iters: int | None = typer.Option(None, "--max-iters", help="Outer iteration cap"),
    time_limit: float | None = typer.Option(None, "--time-limit", help="Wall-time cap (s)"),
    seed: int | None = typer.Option(None, "--seed", help="Random seed"),
    policy_out: Path | None = typer.Option(None, "--policy-out", help="Alpha-vector file"),  # noqa: B008
    trace_out: Path | None = typer.Option(None, "--trace-out", help="Trace CSV"),  # noqa: B008
) -> None:
    """Solve a model with VI or VI1 and write its policy and trace."""
    run = _run_config(
        model_path=model_path,
        algorithm=algorithm,
        epsilon=epsilon,
        epsilon1=epsilon1,
        discount=discount,
        max_iterations=max_iters,
        time_limit_seconds=time_limit,
        seed=seed,
        policy_out=policy_out,
        trace_out=trace_out,
    )
    model = _load(run.model_path, run.discount)
    result = _solve(model, run, run.algorithm)

    if run.policy_out:
        original_units = offset_vectors(
            result.value_function, -model.shift_offset / (1.0 - model.discount)
        )
        write_alpha_file(run.policy_out, original_units)
        typer.echo(f"Policy saved to: {run.policy_out}")
    if run.trace_out:
        result.trace.write_csv(run.trace_out)
        typer.echo(f"Trace saved to: {run.trace_out}")

    _summary(result, model)
    raise typer.Exit(code=EXIT_CONVERGED if result.converged else EXIT_CAPPED)


@app.command("compare")
def compare(
    model_path: Path = typer.Argument(..., help="Model file in .POMDP format"),  # noqa: B008
    epsilon: float | None = typer.Option(None, "--epsilon", help="Target optimality"),
    epsilon1: float | None = typer.Option(None, "--epsilon1", help="Improve stop factor"),
    discount: float | None = typer.Option(None, "--discount", help="Override model discount"),
    max_iters: int | None = typer.Option(None, "--max-iters", help="Outer iteration cap"),
    time_limit: float | None = typer.Option(None, "--time-limit", help="Wall-time cap (s)"),
    trace_out: Path | None = typer.Option(None, "--trace-out", help="Merged trace CSV"),  # noqa: B008
) -> None:
    """Run VI and VI1 under identical caps and report the speedup."""
    run = _run_config(
        model_path=model_path,
        epsilon=epsilon,
        epsilon1=epsilon1,
        discount=discount,
        max_iterations=max_iters,
        time_limit_seconds=time_limit,
        trace_out=trace_out,
    )
    model = _load(run.model_path, run.discount)
    results = [_solve(model, run, algorithm) for algorithm in (Algorithm.VI, Algorithm.VI1)]

    if run.trace_out:
        merged = pl.concat(
            [
                result.trace.to_frame()
                .with_columns(pl.lit(result.algorithm).alias("algorithm"))
                .select("algorithm", *TRACE_COLUMNS)
                for result in results
            ]
        )
        run.trace_out.parent.mkdir(parents=True, exist_ok=True)
        merged.write_csv(run.trace_out)
        typer.echo(f"Comparison trace saved to: {run.trace_out}")

    for result in results:
        _summary(result, model)
    plain, improved = results
    if improved.seconds > 0:
        typer.echo(f"Speedup (vi / vi1 wall time): {plain.seconds / improved.seconds:.2f}x")

    converged = all(result.converged for result in results)
    raise typer.Exit(code=EXIT_CONVERGED if converged else EXIT_CAPPED)


@app.command("eval")
def evaluate(
    policy_path: Path = typer.Argument(..., help="Alpha-vector policy file"),  # noqa: B008
    model_path: Path = typer.Argument(..., help="Model file in .POMDP format"),  # noqa: B008
    belief: str | None = typer.Option(None, "--belief", help="Start belief, e.g. 0.5,0.5"),
    episodes: int | None = typer.Option(None, "--episodes", help="Number of episodes"),
    horizon: int | None = typer.Option(None, "--horizon", help="Episode length"),
    seed: int | None = typer.Option(None, "--seed", help="Random seed"),
    discount: float | None = typer.Option(None, "--discount", help="Override model discount"),
    report_out: Path | None = typer.Option(None, "--report-out", help="Report CSV"),  # noqa: B008
) -> None:
    """Simulate the greedy policy of a saved vector set."""
    run = _run_config(
        model_path=model_path, discount=discount, seed=seed, report_out=report_out
    )
    model = _load(run.model_path, run.discount)
    b0 = _parse_belief(belief, model) if belief else model.start_belief
    n_episodes = config.simulation.episodes if episodes is None else episodes

    try:
        vectors = read_alpha_file(policy_path, n_states=model.n_states)
        shifted = offset_vectors(vectors, model.shift_offset / (1.0 - model.discount))
        report = simulate(model, shifted, b0, n_episodes, horizon=horizon, seed=run.seed)
    except (PomdpError, OSError) as e:
        _fail(str(e))

    if run.report_out:
        report.write_csv(run.report_out)
        typer.echo(f"Report saved to: {run.report_out}")

    typer.echo(f"Episodes:  {report.episodes}")
    typer.echo(f"Horizon:   {report.horizon}")
    typer.echo(f"Mean:      {report.mean:.6f}")
    typer.echo(f"Stderr:    {report.stderr:.6f}")
    typer.echo(f"Predicted: {report.predicted:.6f}")


def cli() -> None:
    """Main CLI entry point."""
    app()
