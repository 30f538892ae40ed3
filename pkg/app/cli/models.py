"""Run parameters for the command-line front end."""

from enum import StrEnum
from pathlib import Path

from pydantic import BaseModel, Field

from app.config import config


class Algorithm(StrEnum):
    VI = "vi"
    VI1 = "vi1"


class RunConfig(BaseModel):
    """Everything one solver run needs, validated up front."""

    model_path: Path = Field(..., description="Model file in .POMDP format")
    algorithm: Algorithm = Field(default=Algorithm.VI1)
    epsilon: float = Field(default_factory=lambda: config.solver.epsilon, gt=0)
    epsilon1: float = Field(default_factory=lambda: config.solver.epsilon1, gt=0, lt=1)
    discount: float | None = Field(default=None, gt=0, lt=1, description="Discount override")
    max_iterations: int = Field(default_factory=lambda: config.solver.max_iterations, ge=1)
    time_limit_seconds: float = Field(
        default_factory=lambda: config.solver.time_limit_seconds, gt=0
    )
    seed: int = Field(default_factory=lambda: config.simulation.seed, ge=0)
    policy_out: Path | None = None
    trace_out: Path | None = None
    report_out: Path | None = None
