"""Greedy one-step-lookahead action selection."""

import numpy as np

from app.exceptions import ModelValidationError
from app.model.beliefs import IMPOSSIBLE_OBSERVATION
from app.model.pomdp import Belief, Pomdp
from app.vectors.alpha import VectorSet

TIE_TOLERANCE = 1e-12


def action_values(model: Pomdp, v: VectorSet, b: Belief) -> np.ndarray:
    """Score of every action: ``r(b, a) + discount * sum_z P(z|b, a) V(b_z^a)``.

    Since ``V`` is a max of linear functions, ``P(z|b, a) V(b_z^a)`` equals the max over
    vectors of the unnormalized successor weights dotted with each vector. Impossible
    observations contribute nothing.
    """
    if len(v) == 0:
        raise ModelValidationError("greedy action needs a non-empty vector set")
    if len(b) != model.n_states or v.n_states != model.n_states:
        raise ModelValidationError("belief, vector set and model dimensions disagree")

    weights = np.einsum("s,aszt->azt", b.probs, model.joint)
    scores = np.einsum("azt,kt->azk", weights, v.matrix).max(axis=2)
    possible = weights.sum(axis=2) > IMPOSSIBLE_OBSERVATION
    future = np.where(possible, scores, 0.0).sum(axis=1)
    return b.probs @ model.reward + model.discount * future


def act(model: Pomdp, v: VectorSet, b: Belief) -> int:
    """Action maximizing the one-step lookahead of ``v``; ties go to the lowest index."""
    values = action_values(model, v, b)
    best = values.max()
    return int(np.flatnonzero(values >= best - TIE_TOLERANCE)[0])
