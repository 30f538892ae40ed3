"""Dynamic-programming update by incremental pruning."""

from __future__ import annotations

from functools import reduce

from loguru import logger

from app.exceptions import ModelValidationError
from app.model.pomdp import Pomdp
from app.vectors.alpha import AlphaVector, VectorSet
from app.vectors.prune import prune


def _check_source(model: Pomdp, source: VectorSet) -> None:
    if len(source) == 0:
        raise ModelValidationError("DP update needs a non-empty vector set")
    if source.n_states != model.n_states:
        raise ModelValidationError(
            f"vector set has {source.n_states} entries, model has {model.n_states} states"
        )


def project(model: Pomdp, action: int, observation: int, source: VectorSet) -> VectorSet:
    """Pruned set of ``r(., a)/|Z| + discount * sum_s' P(z, s'|., a) alpha(s')``."""
    _check_source(model, source)
    share = model.reward[:, action] / model.n_observations
    kernel = model.joint[action, :, observation, :]
    projected = share + model.discount * source.matrix @ kernel.T
    return prune(VectorSet([AlphaVector(row, action=action) for row in projected]))


def cross_sum(x: VectorSet, y: VectorSet) -> VectorSet:
    """Pruned set of all pairwise sums; its envelope is the sum of the two envelopes."""
    if len(x) == 0 or len(y) == 0:
        raise ModelValidationError("cross sum needs two non-empty vector sets")
    if x.n_states != y.n_states:
        raise ModelValidationError("cross sum of sets with different dimensions")

    sums = (x.matrix[:, None, :] + y.matrix[None, :, :]).reshape(-1, x.n_states)
    actions = [
        left.action if left.action == right.action else None for left in x for right in y
    ]
    return prune(
        VectorSet([AlphaVector(row, action=a) for row, a in zip(sums, actions, strict=True)])
    )


def _action_fold(model: Pomdp, action: int, prev: VectorSet) -> VectorSet:
    projections = [project(model, action, z, prev) for z in range(model.n_observations)]
    folded = reduce(cross_sum, projections)
    logger.debug(f"Action {model.action_names[action]}: {len(folded)} vectors after cross sums")
    return folded


def dp_update(model: Pomdp, prev: VectorSet) -> VectorSet:
    """Parsimonious representation of T applied to ``prev``.

    Each action's observation projections are folded by cross sums in ascending observation
    order, then the union over actions is pruned. Output vectors carry the action of their
    fold and an anchor from the final prune.
    """
    _check_source(model, prev)
    folds = [_action_fold(model, a, prev) for a in range(model.n_actions)]
    union = VectorSet(
        [member for fold in folds for member in fold], n_states=model.n_states
    )
    updated = prune(union)
    logger.debug(f"DP update: {len(prev)} -> {len(updated)} vectors (union {len(union)})")
    return updated

