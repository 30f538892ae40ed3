"""Parsimonious pruning of vector sets."""

from __future__ import annotations

import numpy as np
from loguru import logger

from app.exceptions import ModelValidationError
from app.lp.witness import WITNESS_MARGIN, advantage
from app.model.pomdp import Belief
from app.vectors.alpha import DOMINANCE_SLACK, VectorSet

TIE_TOLERANCE = 1e-12


def _drop_componentwise_dominated(matrix: np.ndarray, indices: list[int]) -> list[int]:
    survivors: list[int] = []
    block = matrix[indices]
    for position, index in enumerate(indices):
        covers = np.all(block >= matrix[index] - DOMINANCE_SLACK, axis=1)
        covers[position] = False
        if not covers.any():
            survivors.append(index)
    return survivors


def _best_lexicographic(matrix: np.ndarray, indices: list[int], point: np.ndarray) -> int:
    """Index with the largest value at ``point``; ties go to the lexicographically largest row."""
    scores = matrix[indices] @ point
    top = scores.max()
    tied = [indices[i] for i in np.nonzero(scores >= top - TIE_TOLERANCE)[0]]
    return max(tied, key=lambda i: tuple(matrix[i]))


def prune(vectors: VectorSet) -> VectorSet:
    """Reduce ``vectors`` to a parsimonious subset inducing the same value function.

    Duplicates are collapsed and componentwise-dominated vectors dropped before any LP. The
    remaining candidates go through an incremental witness filter: the kept set starts from
    the best vectors at the uniform belief and at the simplex corners; every pending vector
    is tested against the kept set, and each witness found admits the best pending vector at
    that witness. Kept vectors are anchored at the belief that admitted them.
    """
    if len(vectors) == 0:
        raise ModelValidationError("cannot prune an empty vector set")

    unique = vectors.deduplicated()
    matrix = unique.matrix
    n_states = unique.n_states
    candidates = _drop_componentwise_dominated(matrix, list(range(len(unique))))

    uniform = np.full(n_states, 1.0 / n_states)
    candidates.sort(key=lambda i: -float(matrix[i] @ uniform))

    kept: list[int] = []
    anchors: dict[int, np.ndarray] = {}
    seeds = [uniform, *np.eye(n_states)]
    for point in seeds:
        best = _best_lexicographic(matrix, candidates, point)
        if best not in anchors:
            kept.append(best)
            anchors[best] = point

    pending = [i for i in candidates if i not in anchors]
    lp_count = 0
    while pending:
        index = pending[0]
        belief, margin = advantage(matrix[index], matrix[kept])
        lp_count += 1
        if margin <= WITNESS_MARGIN:
            pending.pop(0)
            continue
        best = _best_lexicographic(matrix, pending, belief)
        pending.remove(best)
        kept.append(best)
        anchors[best] = belief

    logger.debug(
        f"Pruned {len(vectors)} vectors to {len(kept)} "
        f"({len(unique) - len(candidates)} componentwise dominated, {lp_count} LPs)"
    )
    return VectorSet(
        [unique[i].with_anchor(Belief.normalized(anchors[i])) for i in kept],
        n_states=n_states,
    )
