"""Point-based improvement of vector sets between DP updates."""

from __future__ import annotations

import numpy as np
from loguru import logger
from pydantic import BaseModel, Field

from app.config import config as settings
from app.exceptions import BackupIdentityError, ModelValidationError
from app.lp.witness import find_witness
from app.model.beliefs import IMPOSSIBLE_OBSERVATION, successor_weights
from app.model.pomdp import Belief, Pomdp
from app.vectors.alpha import DOMINANCE_SLACK, AlphaVector, VectorSet

IDENTITY_TOLERANCE = 1e-9


class ImproveConfig(BaseModel):
    """Stopping and variant controls for ``improve``."""

    epsilon: float = Field(default_factory=lambda: settings.solver.epsilon, gt=0)
    epsilon1: float = Field(default_factory=lambda: settings.solver.epsilon1, gt=0, lt=1)
    max_inner_iterations: int = Field(
        default_factory=lambda: settings.solver.max_inner_iterations, ge=1
    )
    max_recursion_depth: int = Field(
        default_factory=lambda: settings.solver.max_recursion_depth, ge=1
    )
    all_actions: bool = Field(
        default_factory=lambda: settings.solver.all_actions_backup,
        description="Back up every action at each anchor and keep the best",
    )
    check_backup_identity: bool = Field(
        default_factory=lambda: settings.solver.check_backup_identity,
        description="Verify b.backup(b, a, U) against the one-step lookahead value",
    )

    def threshold(self, discount: float) -> float:
        return self.epsilon1 * self.epsilon * (1.0 - discount) / (2.0 * discount)


def _backup_values(
    model: Pomdp, probs: np.ndarray, action: int, matrix: np.ndarray, check_identity: bool
) -> np.ndarray:
    weights = successor_weights(model, probs, action)
    scores = weights @ matrix.T
    possible = weights.sum(axis=1) > IMPOSSIBLE_OBSERVATION
    chosen = np.where(possible, np.argmax(scores, axis=1), 0)
    futures = matrix[chosen]
    values = model.reward[:, action] + model.discount * np.einsum(
        "szt,zt->s", model.joint[action], futures
    )

    if check_identity:
        lookahead = float(
            model.reward[:, action] @ probs
            + model.discount * scores.max(axis=1)[possible].sum()
        )
        gap = abs(float(values @ probs) - lookahead)
        if gap > IDENTITY_TOLERANCE:
            raise BackupIdentityError(f"backup misses one-step lookahead by {gap:.3e}")
    return values


def backup(
    model: Pomdp, b: Belief, action: int, u: VectorSet, check_identity: bool = False
) -> AlphaVector:
    """Vector whose value at ``b`` is the one-step lookahead of ``u`` under ``action``.

    For each possible observation the best member of ``u`` at the successor belief is
    backed up; impossible observations use the first member of ``u``.
    """
    if len(u) == 0:
        raise ModelValidationError("backup needs a non-empty vector set")
    values = _backup_values(model, b.probs, action, u.matrix, check_identity)
    return AlphaVector(values, action=action, anchor=b)


def _require_anchored(vectors: VectorSet) -> None:
    for member in vectors:
        if member.anchor is None or member.action is None:
            raise ModelValidationError("point-based improvement needs anchored, action-tagged vectors")


def improve_step(model: Pomdp, prev: VectorSet, config: ImproveConfig | None = None) -> VectorSet:
    """Back up every member at its anchor against ``prev`` plus the vectors improved so far.

    A member is kept when its backup would lower the value at its anchor.
    """
    config = config or ImproveConfig()
    _require_anchored(prev)
    n = len(prev)
    pool = np.empty((2 * n, prev.n_states))
    pool[:n] = prev.matrix
    size = n
    actions = range(model.n_actions) if config.all_actions else None

    improved: list[AlphaVector] = []
    for member in prev:
        assert member.anchor is not None and member.action is not None
        probs = member.anchor.probs
        action = member.action
        if actions is None:
            values = _backup_values(model, probs, action, pool[:size], config.check_backup_identity)
        else:
            options = [
                _backup_values(model, probs, a, pool[:size], config.check_backup_identity)
                for a in actions
            ]
            action = int(np.argmax([option @ probs for option in options]))
            values = options[action]

        if member.values @ probs > values @ probs:
            improved.append(member)
            continue
        pool[size] = values
        size += 1
        improved.append(AlphaVector(values, action=action, anchor=member.anchor))

    return VectorSet(improved, n_states=prev.n_states)


def _useful_originals(improved: VectorSet, original: VectorSet) -> list[AlphaVector]:
    """Original vectors still needed next to ``improved``, re-anchored at their witnesses."""
    candidates = [
        member
        for member in original
        if not np.any(np.all(improved.matrix >= member.values - DOMINANCE_SLACK, axis=1))
    ]

    alive = list(range(len(candidates)))
    survivors: list[AlphaVector] = []
    for i, member in enumerate(candidates):
        others = [candidates[j] for j in alive if j != i]
        competitors = improved.union(VectorSet(others, n_states=improved.n_states))
        result = find_witness(member, competitors)
        if result is None:
            alive.remove(i)
            continue
        survivors.append(member.with_anchor(result.witness))
    return survivors


def improve(
    model: Pomdp,
    u: VectorSet,
    config: ImproveConfig | None = None,
    residual: float | None = None,
    depth: int = 0,
) -> VectorSet:
    """Repeat ``improve_step`` until anchor values stall, then merge back what is still useful.

    The inner loop stops once the largest gain at any anchor is at most
    ``epsilon1 * epsilon * (1 - discount) / (2 * discount)``. Original vectors that are not
    componentwise dominated by the improved set and still own a witness region are kept and,
    when any remain, the union is improved again by a recursive call.

    ``residual`` is the outer Bellman residual and is only logged.
    """
    config = config or ImproveConfig()
    _require_anchored(u)
    threshold = config.threshold(model.discount)
    anchors = np.vstack([member.anchor.probs for member in u if member.anchor is not None])

    previous = u
    steps = 0
    for steps in range(1, config.max_inner_iterations + 1):
        current = improve_step(model, previous, config)
        gain = float(np.max(current.values_at(anchors) - previous.values_at(anchors)))
        previous = current
        if gain <= threshold:
            break
    else:
        logger.warning(f"Improve inner loop hit {config.max_inner_iterations} iterations")

    improved = previous.deduplicated()
    survivors = _useful_originals(improved, u)
    logger.debug(
        f"Improve depth {depth}: {steps} steps, {len(improved)} improved, "
        f"{len(survivors)} originals kept, residual={residual}"
    )
    if not survivors:
        return improved

    merged = VectorSet(improved.members + tuple(survivors), n_states=u.n_states)
    if depth + 1 >= config.max_recursion_depth:
        logger.warning(
            f"Improve recursion depth {config.max_recursion_depth} reached; "
            f"returning {len(merged)} vectors"
        )
        return merged
    return improve(model, merged, config, residual, depth + 1)
