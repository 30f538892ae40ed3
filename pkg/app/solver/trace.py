"""Per-iteration convergence records."""

from __future__ import annotations

from enum import StrEnum
from pathlib import Path

import polars as pl
from loguru import logger
from pydantic import BaseModel, Field

TRACE_COLUMNS = ["iter", "phase", "residual", "set_size", "cum_seconds", "epsilon_bound"]


class Phase(StrEnum):
    DP = "dp"
    IMPROVE = "improve"


class TraceRow(BaseModel):
    """One solver phase."""

    iteration: int = Field(..., ge=1, description="Outer iteration index")
    phase: Phase = Field(..., description="Solver phase that produced the row")
    residual: float = Field(..., ge=0, description="Bellman residual of the iteration")
    set_size: int = Field(..., ge=1, description="Vector-set size after the phase")
    cum_seconds: float = Field(..., ge=0, description="Wall time since the solve started")
    epsilon_bound: float = Field(..., ge=0, description="Optimality bound from the residual")


class SolveTrace:
    """Ordered trace rows with CSV export."""

    def __init__(self) -> None:
        self.rows: list[TraceRow] = []

    def __len__(self) -> int:
        return len(self.rows)

    def append(self, row: TraceRow) -> None:
        if self.rows and row.cum_seconds < self.rows[-1].cum_seconds:
            row = row.model_copy(update={"cum_seconds": self.rows[-1].cum_seconds})
        self.rows.append(row)

    @property
    def iterations(self) -> int:
        return self.rows[-1].iteration if self.rows else 0

    def to_frame(self) -> pl.DataFrame:
        return pl.DataFrame(
            {
                "iter": [r.iteration for r in self.rows],
                "phase": [str(r.phase) for r in self.rows],
                "residual": [r.residual for r in self.rows],
                "set_size": [r.set_size for r in self.rows],
                "cum_seconds": [r.cum_seconds for r in self.rows],
                "epsilon_bound": [r.epsilon_bound for r in self.rows],
            },
            schema={
                "iter": pl.Int64,
                "phase": pl.String,
                "residual": pl.Float64,
                "set_size": pl.Int64,
                "cum_seconds": pl.Float64,
                "epsilon_bound": pl.Float64,
            },
        )

    def write_csv(self, path: Path | str) -> None:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        self.to_frame().write_csv(path)
        logger.info(f"Wrote {len(self)} trace rows to {path}")
