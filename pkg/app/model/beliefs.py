"""Belief arithmetic."""

import numpy as np

from app.exceptions import ImpossibleObservationError, ModelValidationError
from app.model.pomdp import Belief, Pomdp

IMPOSSIBLE_OBSERVATION = 1e-12


def _check_action(model: Pomdp, action: int) -> None:
    if not 0 <= action < model.n_actions:
        raise ModelValidationError(f"action index {action} out of range")


def successor_weights(model: Pomdp, probs: np.ndarray, action: int) -> np.ndarray:
    """Unnormalized next beliefs, one row per observation.

    Row ``z`` holds ``sum_s P(z, s'|s, a) b(s)``; its sum is P(z|b, a).
    """
    return np.einsum("s,szt->zt", probs, model.joint[action])


def observation_probabilities(model: Pomdp, b: Belief, action: int) -> np.ndarray:
    _check_action(model, action)
    return successor_weights(model, b.probs, action).sum(axis=1)


def belief_update(model: Pomdp, b: Belief, action: int, observation: int) -> tuple[Belief, float]:
    """Bayes update of ``b`` after taking ``action`` and observing ``observation``.

    Returns:
        Tuple of (next belief, P(z|b, a))

    Raises:
        ImpossibleObservationError: when P(z|b, a) <= 1e-12
    """
    _check_action(model, action)
    if not 0 <= observation < model.n_observations:
        raise ModelValidationError(f"observation index {observation} out of range")
    if len(b) != model.n_states:
        raise ModelValidationError(f"belief has {len(b)} entries, model has {model.n_states}")

    weights = b.probs @ model.joint[action, :, observation, :]
    probability = float(weights.sum())
    if probability <= IMPOSSIBLE_OBSERVATION:
        raise ImpossibleObservationError(action, observation, probability)
    return Belief.normalized(weights), probability


def expected_reward(model: Pomdp, b: Belief, action: int) -> float:
    _check_action(model, action)
    return float(model.reward[:, action] @ b.probs)
