"""Greedy policies and their Monte-Carlo evaluation."""

from app.policy.greedy import act, action_values
from app.policy.simulation import EvaluationReport, default_horizon, simulate, truncation_bias

__all__ = [
    "EvaluationReport",
    "act",
    "action_values",
    "default_horizon",
    "simulate",
    "truncation_bias",
]
