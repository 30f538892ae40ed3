"""Witness searches and set-difference maximization over the belief simplex."""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from app.exceptions import LPDegenerateError, ModelValidationError
from app.lp.simplex import LPStatus, solve_simplex_lp
from app.model.pomdp import Belief

if TYPE_CHECKING:
    from app.vectors.alpha import AlphaVector, VectorSet

WITNESS_MARGIN = 1e-9
DOMINANCE_SLACK = 1e-12


@dataclass(frozen=True)
class WitnessResult:
    """Belief where a candidate beats all competitors, and by how much."""

    witness: Belief
    margin: float


def advantage(candidate: np.ndarray, competitors: np.ndarray) -> tuple[np.ndarray, float]:
    """Solve ``max_b min_k (candidate - competitors[k]).b`` over the simplex.

    The free margin is shifted by a lower bound so every LP variable stays nonnegative.

    Returns:
        Tuple of (maximizing belief, margin recomputed by direct inner products)
    """
    n_states = candidate.size
    diffs = competitors - candidate
    floor = min(0.0, float(-diffs.max()))

    a_ub = np.hstack([diffs, np.ones((diffs.shape[0], 1))])
    b_ub = np.full(diffs.shape[0], -floor)
    a_eq = np.append(np.ones(n_states), 0.0)[None, :]
    objective = np.zeros(n_states + 1)
    objective[-1] = 1.0

    result = solve_simplex_lp(objective, a_ub, b_ub, a_eq, np.ones(1))
    if result.status is not LPStatus.OPTIMAL or result.x is None:
        raise LPDegenerateError(
            f"witness LP ended {result.status}", result.pivots, diffs.shape[0] + 1, n_states + 1
        )

    weights = result.x[:n_states]
    belief = weights / weights.sum()
    margin = float(np.min(-(diffs @ belief)))
    return belief, margin


def find_witness(candidate: AlphaVector, competitors: VectorSet) -> WitnessResult | None:
    """Find a belief where ``candidate`` strictly beats every competitor.

    Returns:
        WitnessResult with margin > 1e-9, or None when no such belief exists. An empty
        competitor set yields the uniform belief with infinite margin.
    """
    n_states = candidate.values.size
    if len(competitors) == 0:
        return WitnessResult(witness=Belief.uniform(n_states), margin=float("inf"))
    if competitors.matrix.shape[1] != n_states:
        raise ModelValidationError(
            f"candidate has {n_states} entries, competitors have {competitors.matrix.shape[1]}"
        )

    if np.any(np.all(competitors.matrix >= candidate.values - DOMINANCE_SLACK, axis=1)):
        return None

    belief, margin = advantage(candidate.values, competitors.matrix)
    if margin <= WITNESS_MARGIN:
        return None
    return WitnessResult(witness=Belief(belief), margin=margin)


def _one_sided_difference(upper: np.ndarray, lower: np.ndarray) -> float:
    best = 0.0
    for values in upper:
        if np.any(np.all(lower >= values - DOMINANCE_SLACK, axis=1)):
            continue
        bound = float(np.min(np.max(values - lower, axis=1)))
        if bound <= best:
            continue
        _, margin = advantage(values, lower)
        best = max(best, margin)
    return best


def max_difference(upper: VectorSet, lower: VectorSet) -> float:
    """Return ``max_b |upper(b) - lower(b)|`` using one LP per vector."""
    if len(upper) == 0 or len(lower) == 0:
        raise ModelValidationError("max_difference needs two non-empty vector sets")
    if upper.matrix.shape[1] != lower.matrix.shape[1]:
        raise ModelValidationError("vector sets have different dimensions")
    return max(
        _one_sided_difference(upper.matrix, lower.matrix),
        _one_sided_difference(lower.matrix, upper.matrix),
    )
