"""Monte-Carlo evaluation of the greedy policy induced by a vector set."""

from __future__ import annotations

import math
from functools import lru_cache
from pathlib import Path

import numpy as np
import polars as pl
from loguru import logger
from pydantic import BaseModel, Field

from app.config import config
from app.exceptions import ModelValidationError
from app.model.beliefs import belief_update
from app.model.pomdp import Belief, Pomdp, unshift_value
from app.policy.greedy import act
from app.vectors.alpha import VectorSet


class EvaluationReport(BaseModel):
    """Summary of a simulation run, in original reward units."""

    episodes: int = Field(..., ge=1)
    horizon: int = Field(..., ge=1)
    seed: int
    mean: float = Field(..., description="Sample mean of the discounted return")
    stderr: float = Field(..., ge=0, description="Standard error of the mean")
    predicted: float | None = Field(default=None, description="Value function at b0")

    def to_frame(self) -> pl.DataFrame:
        return pl.DataFrame([self.model_dump()])

    def write_csv(self, path: Path | str) -> None:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        self.to_frame().write_csv(path)
        logger.info(f"Wrote evaluation report to {path}")


def _reward_bound(model: Pomdp) -> float:
    # Covers the truncated tail of shifted rewards and the tail of the unshift correction.
    return max(float(np.abs(model.reward).max()), model.shift_offset)


def default_horizon(model: Pomdp, bias: float | None = None) -> int:
    """Smallest H with ``discount**H * r_max / (1 - discount) <= bias``."""
    bias = config.simulation.truncation_bias if bias is None else bias
    if bias <= 0:
        raise ModelValidationError(f"truncation bias must be positive, got {bias}")
    r_max = _reward_bound(model)
    if r_max == 0.0:
        return 1
    ratio = bias * (1.0 - model.discount) / r_max
    if ratio >= 1.0:
        return 1
    return max(1, math.ceil(math.log(ratio) / math.log(model.discount)))


def truncation_bias(model: Pomdp, horizon: int) -> float:
    return model.discount**horizon * _reward_bound(model) / (1.0 - model.discount)


def _sample(rng: np.random.Generator, probs: np.ndarray) -> int:
    """Inverse-CDF draw from an indexed distribution."""
    cdf = np.cumsum(probs)
    return min(int(np.searchsorted(cdf, rng.random() * cdf[-1], side="right")), probs.size - 1)


class _GreedyPolicy:
    """Greedy actions and belief updates behind bounded LRU memos keyed by belief bytes.

    Short-horizon or near-deterministic models revisit the same beliefs; elsewhere the
    memo only holds the most recent ``cache_size`` entries.
    """

    def __init__(self, model: Pomdp, v: VectorSet, cache_size: int | None = None) -> None:
        self.model = model
        self.v = v
        size = config.simulation.belief_cache_size if cache_size is None else cache_size
        self._action = lru_cache(maxsize=size)(self._action_for)
        self._update = lru_cache(maxsize=size)(self._update_for)

    def _action_for(self, key: bytes) -> int:
        return act(self.model, self.v, Belief(np.frombuffer(key)))

    def _update_for(self, key: bytes, action: int, observation: int) -> Belief:
        successor, _ = belief_update(self.model, Belief(np.frombuffer(key)), action, observation)
        return successor

    def action(self, b: Belief) -> int:
        return self._action(b.probs.tobytes())

    def update(self, b: Belief, action: int, observation: int) -> Belief:
        return self._update(b.probs.tobytes(), action, observation)

    def cache_sizes(self) -> tuple[int, int]:
        return self._action.cache_info().currsize, self._update.cache_info().currsize


def _episode(
    model: Pomdp, policy: _GreedyPolicy, b0: Belief, horizon: int, rng: np.random.Generator
) -> float:
    state = _sample(rng, b0.probs)
    belief = b0
    total = 0.0
    weight = 1.0
    for _ in range(horizon):
        action = policy.action(belief)
        total += weight * model.reward[state, action]
        weight *= model.discount
        state = _sample(rng, model.transition[action, state])
        observation = _sample(rng, model.observation[action, state])
        belief = policy.update(belief, action, observation)
    return total


def simulate(
    model: Pomdp,
    v: VectorSet,
    b0: Belief,
    episodes: int,
    horizon: int | None = None,
    seed: int = 0,
) -> EvaluationReport:
    """Mean discounted return of the greedy policy for ``v`` from ``b0``.

    Each episode draws from its own PCG64 stream spawned from ``seed``, so results are
    reproducible for a fixed seed. Returns are accrued on ``model`` and reported through
    ``unshift_value``; ``predicted`` is ``v`` at ``b0`` in the same units.

    Raises:
        ModelValidationError: when ``episodes`` is not positive or dimensions disagree
    """
    if episodes < 1:
        raise ModelValidationError("episodes must be positive")
    if len(b0) != model.n_states or v.n_states != model.n_states:
        raise ModelValidationError("belief, vector set and model dimensions disagree")
    if horizon is None:
        horizon = default_horizon(model)
    elif horizon < 1:
        raise ModelValidationError("horizon must be positive")
    else:
        bias = truncation_bias(model, horizon)
        if bias > config.simulation.truncation_bias:
            logger.warning(f"Horizon {horizon} leaves a truncation bias up to {bias:.4g}")

    logger.info(f"Simulating {episodes} episodes, horizon {horizon}, seed {seed}")
    policy = _GreedyPolicy(model, v)
    streams = np.random.SeedSequence(seed).spawn(episodes)
    returns = np.array(
        [
            _episode(model, policy, b0, horizon, np.random.Generator(np.random.PCG64(stream)))
            for stream in streams
        ]
    )

    stderr = float(returns.std(ddof=1) / math.sqrt(episodes)) if episodes > 1 else 0.0
    report = EvaluationReport(
        episodes=episodes,
        horizon=horizon,
        seed=seed,
        mean=unshift_value(float(returns.mean()), model),
        stderr=stderr,
        predicted=unshift_value(v.evaluate(b0), model),
    )
    logger.info(
        f"Mean return {report.mean:.4f} +/- {report.stderr:.4f} (predicted {report.predicted:.4f})"
    )
    return report
