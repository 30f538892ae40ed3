"""POMDP and belief types, plus the nonnegative-reward transformation."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field

import numpy as np
from loguru import logger

from app.exceptions import ModelValidationError

PROBABILITY_TOLERANCE = 1e-9


def _frozen(array: np.ndarray) -> np.ndarray:
    array = np.array(array, dtype=np.float64)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class Belief:
    """Probability distribution over states."""

    probs: np.ndarray

    def __post_init__(self) -> None:
        probs = np.asarray(self.probs, dtype=np.float64)
        if probs.ndim != 1 or probs.size == 0:
            raise ModelValidationError(f"belief must be a non-empty vector, got shape {probs.shape}")
        if not np.all(np.isfinite(probs)):
            raise ModelValidationError("belief entries must be finite")
        if probs.min() < -PROBABILITY_TOLERANCE:
            raise ModelValidationError(f"belief has negative entry {probs.min():.3e}")
        total = probs.sum()
        if abs(total - 1.0) > PROBABILITY_TOLERANCE:
            raise ModelValidationError(f"belief sums to {total:.12f}, expected 1")
        object.__setattr__(self, "probs", _frozen(np.clip(probs, 0.0, None)))

    def __len__(self) -> int:
        return int(self.probs.size)

    @classmethod
    def uniform(cls, n_states: int) -> Belief:
        return cls(np.full(n_states, 1.0 / n_states))

    @classmethod
    def point(cls, n_states: int, state: int) -> Belief:
        probs = np.zeros(n_states)
        probs[state] = 1.0
        return cls(probs)

    @classmethod
    def normalized(cls, weights: np.ndarray) -> Belief:
        """Build a belief from nonnegative weights, absorbing round-off drift."""
        weights = np.clip(np.asarray(weights, dtype=np.float64), 0.0, None)
        total = weights.sum()
        if total <= 0.0:
            raise ModelValidationError("cannot normalize an all-zero weight vector")
        return cls(weights / total)


@dataclass(frozen=True, eq=False)
class Pomdp:
    """Discounted POMDP with reward r(s, a).

    Tables are indexed ``reward[s, a]``, ``transition[a, s, s']`` and
    ``observation[a, s', z]``. ``joint[a, s, z, s']`` caches P(z, s'|s, a).
    """

    state_names: tuple[str, ...]
    action_names: tuple[str, ...]
    observation_names: tuple[str, ...]
    reward: np.ndarray
    transition: np.ndarray
    observation: np.ndarray
    discount: float
    shift_offset: float = 0.0
    start: np.ndarray | None = None
    joint: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        n_s, n_a, n_z = len(self.state_names), len(self.action_names), len(self.observation_names)
        if min(n_s, n_a, n_z) == 0:
            raise ModelValidationError("states, actions and observations must be non-empty")

        reward = np.asarray(self.reward, dtype=np.float64)
        transition = np.asarray(self.transition, dtype=np.float64)
        observation = np.asarray(self.observation, dtype=np.float64)

        expected = {
            "reward": (reward, (n_s, n_a)),
            "transition": (transition, (n_a, n_s, n_s)),
            "observation": (observation, (n_a, n_s, n_z)),
        }
        for name, (table, shape) in expected.items():
            if table.shape != shape:
                raise ModelValidationError(f"{name} has shape {table.shape}, expected {shape}")
            if not np.all(np.isfinite(table)):
                raise ModelValidationError(f"{name} contains non-finite entries")

        for name, table in (("transition", transition), ("observation", observation)):
            if table.min() < 0.0:
                raise ModelValidationError(f"{name} has negative probability {table.min():.3e}")
            deviation = np.abs(table.sum(axis=2) - 1.0).max()
            if deviation > PROBABILITY_TOLERANCE:
                raise ModelValidationError(f"{name} rows deviate from 1 by {deviation:.3e}")

        if not 0.0 < self.discount < 1.0:
            raise ModelValidationError(f"discount must lie in (0, 1), got {self.discount}")
        if self.shift_offset < 0.0:
            raise ModelValidationError(f"shift offset must be nonnegative, got {self.shift_offset}")

        start = Belief.uniform(n_s).probs if self.start is None else Belief(self.start).probs
        if start.size != n_s:
            raise ModelValidationError(f"start belief has {start.size} entries, expected {n_s}")

        object.__setattr__(self, "reward", _frozen(reward))
        object.__setattr__(self, "transition", _frozen(transition))
        object.__setattr__(self, "observation", _frozen(observation))
        object.__setattr__(self, "discount", float(self.discount))
        object.__setattr__(self, "shift_offset", float(self.shift_offset))
        object.__setattr__(self, "start", start)
        object.__setattr__(
            self, "joint", _frozen(np.einsum("ast,atz->aszt", transition, observation))
        )

    @property
    def n_states(self) -> int:
        return len(self.state_names)

    @property
    def n_actions(self) -> int:
        return len(self.action_names)

    @property
    def n_observations(self) -> int:
        return len(self.observation_names)

    @property
    def start_belief(self) -> Belief:
        assert self.start is not None
        return Belief(self.start)

    @classmethod
    def from_arrays(
        cls,
        reward: np.ndarray,
        transition: np.ndarray,
        observation: np.ndarray,
        discount: float,
        start: np.ndarray | None = None,
    ) -> Pomdp:
        """Build a model with index-valued names from raw tables."""
        n_a, n_s, n_z = np.shape(observation)
        return cls(
            state_names=tuple(str(i) for i in range(n_s)),
            action_names=tuple(str(i) for i in range(n_a)),
            observation_names=tuple(str(i) for i in range(n_z)),
            reward=reward,
            transition=transition,
            observation=observation,
            discount=discount,
            start=start,
        )

    def describe(self) -> str:
        return (
            f"|S|={self.n_states} |Z|={self.n_observations} |A|={self.n_actions} "
            f"discount={self.discount} shift={self.shift_offset}"
        )


def shift_rewards(model: Pomdp) -> Pomdp:
    """Make every reward nonnegative by adding C = -min r(s, a) when needed."""
    min_reward = float(model.reward.min())
    if min_reward >= 0.0:
        return model

    offset = -min_reward
    logger.info(f"Shifting rewards by C={offset}")
    return dataclasses.replace(
        model,
        reward=model.reward + offset,
        shift_offset=model.shift_offset + offset,
    )


def unshift_value(value: float, model: Pomdp) -> float:
    """Translate a value of the shifted model back into original reward units."""
    return value - model.shift_offset / (1.0 - model.discount)


def with_discount(model: Pomdp, discount: float) -> Pomdp:
    return dataclasses.replace(model, discount=discount)
