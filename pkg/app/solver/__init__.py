"""Value iteration solvers."""

from app.solver.trace import Phase, SolveTrace, TraceRow
from app.solver.value_iteration import (
    SolveLimits,
    SolveResult,
    epsilon_bound,
    stopping_threshold,
    vi,
    vi1,
)

__all__ = [
    "Phase",
    "SolveLimits",
    "SolveResult",
    "SolveTrace",
    "TraceRow",
    "epsilon_bound",
    "stopping_threshold",
    "vi",
    "vi1",
]
