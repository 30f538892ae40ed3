"""Value iteration (VI) and value iteration with point-based improvement (VI1)."""

from __future__ import annotations

import time
from collections.abc import Callable
from dataclasses import dataclass

from loguru import logger
from pydantic import BaseModel, Field

from app.config import config
from app.dp.incremental_pruning import dp_update
from app.exceptions import ModelValidationError
from app.improve.point_based import ImproveConfig, improve
from app.lp.witness import max_difference
from app.model.pomdp import Pomdp
from app.solver.trace import Phase, SolveTrace, TraceRow
from app.vectors.alpha import VectorSet

IterationObserver = Callable[[int, VectorSet], None]


class SolveLimits(BaseModel):
    """Iteration and wall-time caps."""

    max_iterations: int = Field(default_factory=lambda: config.solver.max_iterations, ge=1)
    time_limit_seconds: float = Field(
        default_factory=lambda: config.solver.time_limit_seconds, gt=0
    )


@dataclass
class SolveResult:
    """Final vector set with its convergence record."""

    value_function: VectorSet
    trace: SolveTrace
    converged: bool
    epsilon_achieved: float
    algorithm: str

    @property
    def iterations(self) -> int:
        return self.trace.iterations

    @property
    def seconds(self) -> float:
        return self.trace.rows[-1].cum_seconds if self.trace.rows else 0.0


def stopping_threshold(epsilon: float, discount: float) -> float:
    """Residual below which a greedy policy is epsilon-optimal."""
    return epsilon * (1.0 - discount) / (2.0 * discount)


def epsilon_bound(residual: float, discount: float) -> float:
    """Optimality bound of a greedy policy given the Bellman residual."""
    return 2.0 * discount * residual / (1.0 - discount)


class _Run:
    """Shared bookkeeping for one solve."""

    def __init__(self, model: Pomdp, epsilon: float, limits: SolveLimits | None, name: str):
        if epsilon <= 0:
            raise ModelValidationError(f"epsilon must be positive, got {epsilon}")
        self.model = model
        self.limits = limits or SolveLimits()
        self.threshold = stopping_threshold(epsilon, model.discount)
        self.trace = SolveTrace()
        self.started = time.perf_counter()
        self.name = name
        logger.info(
            f"Starting {name} on {model.describe()} epsilon={epsilon} "
            f"threshold={self.threshold:.3e}"
        )

    def elapsed(self) -> float:
        return time.perf_counter() - self.started

    def record(self, iteration: int, phase: Phase, residual: float, size: int) -> None:
        self.trace.append(
            TraceRow(
                iteration=iteration,
                phase=phase,
                residual=residual,
                set_size=size,
                cum_seconds=self.elapsed(),
                epsilon_bound=epsilon_bound(residual, self.model.discount),
            )
        )

    def capped(self, iteration: int) -> bool:
        if iteration >= self.limits.max_iterations:
            logger.warning(f"{self.name} stopped at the {iteration}-iteration cap")
            return True
        if self.elapsed() >= self.limits.time_limit_seconds:
            logger.warning(f"{self.name} stopped at the {self.limits.time_limit_seconds}s time limit")
            return True
        return False

    def finish(self, vectors: VectorSet, residual: float, converged: bool) -> SolveResult:
        result = SolveResult(
            value_function=vectors,
            trace=self.trace,
            converged=converged,
            epsilon_achieved=epsilon_bound(residual, self.model.discount),
            algorithm=self.name,
        )
        logger.info(
            f"{self.name} {'converged' if converged else 'stopped'} after {result.iterations} "
            f"iterations in {result.seconds:.2f}s, epsilon_achieved={result.epsilon_achieved:.4g}"
        )
        return result


def vi(
    model: Pomdp,
    epsilon: float,
    limits: SolveLimits | None = None,
    on_iteration: IterationObserver | None = None,
) -> SolveResult:
    """Value iteration from {0} with incremental-pruning DP updates."""
    run = _Run(model, epsilon, limits, "vi")
    if model.reward.min() < 0:
        logger.warning("Model has negative rewards; iterates will not be monotone")

    current = VectorSet.zero(model.n_states)
    iteration = 0
    residual = float("inf")
    while True:
        iteration += 1
        updated = dp_update(model, current)
        residual = max_difference(updated, current)
        run.record(iteration, Phase.DP, residual, len(updated))
        logger.info(f"vi iteration {iteration}: residual={residual:.6g} vectors={len(updated)}")
        if on_iteration is not None:
            on_iteration(iteration, updated)
        current = updated

        if residual <= run.threshold:
            return run.finish(current, residual, converged=True)
        if run.capped(iteration):
            return run.finish(current, residual, converged=False)


def vi1(
    model: Pomdp,
    epsilon: float,
    config: ImproveConfig | None = None,
    limits: SolveLimits | None = None,
    on_iteration: IterationObserver | None = None,
) -> SolveResult:
    """Value iteration with point-based improvement between DP updates.

    The residual is measured between each DP-update output and the previous improved set.
    """
    if model.reward.min() < 0:
        raise ModelValidationError("vi1 needs nonnegative rewards; apply shift_rewards first")
    improve_config = (config or ImproveConfig()).model_copy(update={"epsilon": epsilon})
    run = _Run(model, epsilon, limits, "vi1")

    current = VectorSet.zero(model.n_states)
    iteration = 0
    while True:
        iteration += 1
        updated = dp_update(model, current)
        residual = max_difference(updated, current)
        run.record(iteration, Phase.DP, residual, len(updated))

        if residual <= run.threshold:
            run.record(iteration, Phase.IMPROVE, residual, len(updated))
            logger.info(f"vi1 iteration {iteration}: residual={residual:.6g} vectors={len(updated)}")
            if on_iteration is not None:
                on_iteration(iteration, updated)
            return run.finish(updated, residual, converged=True)

        current = improve(model, updated, improve_config, residual=residual)
        run.record(iteration, Phase.IMPROVE, residual, len(current))
        logger.info(
            f"vi1 iteration {iteration}: residual={residual:.6g} "
            f"vectors={len(updated)} -> {len(current)} after improve"
        )
        if on_iteration is not None:
            on_iteration(iteration, current)

        if run.capped(iteration):
            return run.finish(current, residual, converged=False)
