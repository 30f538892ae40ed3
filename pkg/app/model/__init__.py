"""POMDP data model."""

from app.model.beliefs import (
    IMPOSSIBLE_OBSERVATION,
    belief_update,
    expected_reward,
    observation_probabilities,
    successor_weights,
)
from app.model.parser import load_pomdp, parse_pomdp, serialize_pomdp
from app.model.pomdp import Belief, Pomdp, shift_rewards, unshift_value, with_discount

__all__ = [
    "IMPOSSIBLE_OBSERVATION",
    "Belief",
    "Pomdp",
    "belief_update",
    "expected_reward",
    "load_pomdp",
    "observation_probabilities",
    "parse_pomdp",
    "serialize_pomdp",
    "shift_rewards",
    "successor_weights",
    "unshift_value",
    "with_discount",
]
