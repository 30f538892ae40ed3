"""Test configuration fixtures."""

import itertools
import os
from collections.abc import Callable, Iterator
from pathlib import Path

import numpy as np
import pytest
from dotenv import load_dotenv
from loguru import logger

env_path = Path(__file__).parent.parent / ".env"
load_dotenv(env_path)

os.environ.setdefault("LOGGING__LEVEL", "WARNING")

from app.model import Pomdp, load_pomdp, shift_rewards  # noqa: E402
from app.vectors import VectorSet  # noqa: E402

MODELS_DIR = Path(__file__).parent.parent / "models"

CONSTANT_MODEL_TEXT = """\
discount: 0.5
values: reward
states: 2
actions: 2
observations: 2

T: *
uniform

O: *
uniform

R: * : * : * : * 1
"""


def simplex_grid(n_states: int, step: float) -> np.ndarray:
    """Regular grid over the belief simplex for up to three states."""
    k = round(1.0 / step)
    if n_states == 1:
        return np.ones((1, 1))
    if n_states == 2:
        t = np.arange(k + 1) / k
        return np.column_stack([t, 1.0 - t])
    if n_states == 3:
        points = [(i, j, k - i - j) for i in range(k + 1) for j in range(k + 1 - i)]
        return np.array(points, dtype=np.float64) / k
    raise ValueError(f"grid not supported for {n_states} states")


def make_random_pomdp(
    rng: np.random.Generator,
    n_states: int,
    n_actions: int,
    n_observations: int,
    discount: float = 0.9,
    reward_scale: float = 10.0,
) -> Pomdp:
    transition = rng.dirichlet(np.ones(n_states), size=(n_actions, n_states))
    observation = rng.dirichlet(np.ones(n_observations), size=(n_actions, n_states))
    reward = rng.uniform(0.0, reward_scale, size=(n_states, n_actions))
    return Pomdp.from_arrays(reward, transition, observation, discount)


def grid_value_iteration(
    model: Pomdp, step: float = 1e-4, tolerance: float = 1e-10, max_iterations: int = 10000
) -> tuple[np.ndarray, np.ndarray]:
    """Value iteration on a dense grid of a 2-state simplex with linear interpolation.

    Interpolating a convex function never undershoots it, so the result is an upper bound
    on V* that tightens as ``step`` shrinks.
    """
    if model.n_states != 2:
        raise ValueError("grid value iteration needs a 2-state model")
    beliefs = simplex_grid(2, step)
    coordinates = beliefs[:, 0]
    weights = np.einsum("gs,aszt->gazt", beliefs, model.joint)
    likelihood = weights.sum(axis=3)
    successors = weights[..., 0] / np.where(likelihood > 1e-12, likelihood, 1.0)
    immediate = beliefs @ model.reward

    values = np.zeros(len(beliefs))
    for _ in range(max_iterations):
        future = (likelihood * np.interp(successors, coordinates, values)).sum(axis=2)
        updated = (immediate + model.discount * future).max(axis=1)
        converged = np.max(np.abs(updated - values)) < tolerance
        values = updated
        if converged:
            break
    return beliefs, values


def enumerate_update(model: Pomdp, prev: VectorSet) -> np.ndarray:
    """Every vector of T(prev) before pruning: one per action and observation strategy."""
    rows = []
    for a in range(model.n_actions):
        for choice in itertools.product(range(len(prev)), repeat=model.n_observations):
            values = model.reward[:, a].copy()
            for z, k in enumerate(choice):
                values += model.discount * model.joint[a, :, z, :] @ prev.matrix[k]
            rows.append(values)
    return np.array(rows)


@pytest.fixture
def tiger() -> Pomdp:
    """Tiger with its original (partly negative) rewards."""
    return load_pomdp(MODELS_DIR / "tiger.95.POMDP")


@pytest.fixture
def tiger_shifted(tiger: Pomdp) -> Pomdp:
    return shift_rewards(tiger)


@pytest.fixture
def constant_model() -> Pomdp:
    """Two states, two actions, reward 1 everywhere, discount 0.5."""
    return Pomdp.from_arrays(
        reward=np.ones((2, 2)),
        transition=np.full((2, 2, 2), 0.5),
        observation=np.full((2, 2, 2), 0.5),
        discount=0.5,
    )


@pytest.fixture
def constant_model_file(tmp_path: Path) -> Path:
    path = tmp_path / "constant.POMDP"
    path.write_text(CONSTANT_MODEL_TEXT)
    return path


@pytest.fixture
def tiger_file() -> Path:
    return MODELS_DIR / "tiger.95.POMDP"


@pytest.fixture
def random_pomdp() -> Callable[..., Pomdp]:
    """Factory for random models with nonnegative rewards."""
    return make_random_pomdp


@pytest.fixture
def grid() -> Callable[[int, float], np.ndarray]:
    return simplex_grid


@pytest.fixture
def grid_oracle() -> Callable[..., tuple[np.ndarray, np.ndarray]]:
    return grid_value_iteration


@pytest.fixture
def log_messages() -> Iterator[list[str]]:
    """Warning-and-above loguru messages emitted during the test."""
    messages: list[str] = []
    handler = logger.add(
        lambda message: messages.append(message.record["message"]), level="WARNING"
    )
    yield messages
    logger.remove(handler)


@pytest.fixture
def enumeration_oracle() -> Callable[[Pomdp, VectorSet], np.ndarray]:
    return enumerate_update
