"""Test point-based backups and improvement."""

import numpy as np
import pytest
from pydantic import ValidationError

from app.dp import dp_update
from app.exceptions import ImpossibleObservationError, ModelValidationError
from app.improve import ImproveConfig, backup, improve, improve_step
from app.model import Belief, belief_update, expected_reward, observation_probabilities
from app.vectors import AlphaVector, VectorSet


def _lookahead(model, b, action, u):
    """r(b, a) + discount * sum_z P(z|b, a) U(b_z^a), computed through belief updates."""
    total = expected_reward(model, b, action)
    for z, probability in enumerate(observation_probabilities(model, b, action)):
        try:
            successor, _ = belief_update(model, b, action, z)
        except ImpossibleObservationError:
            continue
        total += model.discount * probability * u.evaluate(successor)
    return total


def test_backup_matches_one_step_lookahead(random_pomdp):
    """Test b.backup(b, a, U) equals the one-step lookahead on 1000 random tuples."""
    rng = np.random.default_rng(1000)
    checked = 0
    while checked < 1000:
        n_states = int(rng.integers(1, 5))
        model = random_pomdp(
            rng, n_states, int(rng.integers(1, 4)), int(rng.integers(1, 4)), discount=0.95
        )
        for _ in range(20):
            size = int(rng.integers(1, 6))
            u = VectorSet([AlphaVector(v) for v in rng.uniform(-5, 5, size=(size, n_states))])
            b = Belief(rng.dirichlet(np.ones(n_states)))
            action = int(rng.integers(model.n_actions))

            vector = backup(model, b, action, u)

            assert abs(vector.dot(b) - _lookahead(model, b, action, u)) <= 1e-9
            checked += 1


def test_backup_identity_check_passes(tiger_shifted):
    """Test the debug identity check accepts correct backups."""
    u = dp_update(tiger_shifted, VectorSet.zero(2))
    b = Belief(np.array([0.3, 0.7]))

    vector = backup(tiger_shifted, b, 0, u, check_identity=True)

    assert vector.action == 0
    assert vector.anchor is b


def test_backup_empty_set_raises(tiger_shifted):
    """Test backing up against nothing raises."""
    with pytest.raises(ModelValidationError):
        backup(tiger_shifted, Belief.uniform(2), 0, VectorSet([], n_states=2))


def test_improve_config_validation():
    """Test parameter constraints."""
    assert ImproveConfig(epsilon=0.01, epsilon1=0.1).threshold(0.95) == pytest.approx(
        0.1 * 0.01 * 0.05 / 1.9
    )
    with pytest.raises(ValidationError):
        ImproveConfig(epsilon1=1.0)
    with pytest.raises(ValidationError):
        ImproveConfig(epsilon=0.0)


def test_improve_step_never_lowers_anchor_values(tiger_shifted):
    """Test one improvement step is monotone at every anchor."""
    u = VectorSet.zero(2)
    for _ in range(3):
        u = dp_update(tiger_shifted, u)
    anchors = np.vstack([member.anchor.probs for member in u])

    stepped = improve_step(tiger_shifted, u)

    assert len(stepped) == len(u)
    assert np.all(stepped.values_at(anchors) >= u.values_at(anchors) - 1e-9)
    for before, after in zip(u, stepped, strict=True):
        assert after.dot(before.anchor) >= before.dot(before.anchor) - 1e-9


def test_improve_requires_anchors(tiger_shifted):
    """Test unanchored vectors are rejected."""
    with pytest.raises(ModelValidationError):
        improve(tiger_shifted, VectorSet.zero(2), ImproveConfig())


@pytest.mark.parametrize("all_actions", [False, True])
def test_improve_dominates_input(random_pomdp, grid, all_actions):
    """Test the improved set is never below its input on the simplex."""
    rng = np.random.default_rng(5)
    config = ImproveConfig(epsilon=0.01, epsilon1=0.1, all_actions=all_actions)
    for _ in range(8):
        n_states = int(rng.integers(2, 4))
        model = random_pomdp(rng, n_states, int(rng.integers(2, 4)), 2, discount=0.9)
        points = grid(n_states, 1e-3 if n_states == 2 else 2e-2)

        u = VectorSet.zero(n_states)
        for _ in range(2):
            u = dp_update(model, u)

        improved = improve(model, u, config)

        assert len(improved) >= 1
        assert np.all(improved.values_at(points) >= u.values_at(points) - 1e-7)
        for member in improved:
            assert member.anchor is not None
            assert member.action is not None


def test_improve_stays_below_a_later_update(tiger_shifted, grid):
    """Test improvement from T^2{0} stays under the optimal value bound."""
    points = grid(2, 1e-3)
    u = dp_update(tiger_shifted, dp_update(tiger_shifted, VectorSet.zero(2)))

    improved = improve(tiger_shifted, u, ImproveConfig(epsilon=0.01, epsilon1=0.1))

    upper = tiger_shifted.reward.max() / (1.0 - tiger_shifted.discount)
    assert np.all(improved.values_at(points) <= upper + 1e-9)
    assert np.all(improved.values_at(points) >= u.values_at(points) - 1e-7)


def _anchored(values, anchor):
    return VectorSet([AlphaVector(np.array(values, dtype=float), action=0, anchor=anchor)])


def test_improve_step_keeps_fixed_point(constant_model):
    """Test a set already at the fixed point comes back unchanged."""
    u = _anchored([2.0, 2.0], Belief.uniform(2))

    stepped = improve_step(constant_model, u)

    np.testing.assert_allclose(stepped.matrix, u.matrix, atol=1e-12)
    assert stepped[0].anchor is u[0].anchor


def test_improve_climbs_toward_fixed_point(constant_model):
    """Test repeated backups from zero climb 1, 1.5, 1.75 and stop just below 2."""
    b = Belief.uniform(2)
    u = _anchored([0.0, 0.0], b)

    climbed = []
    current = u
    for _ in range(3):
        current = improve_step(constant_model, current)
        climbed.append(current.evaluate(b))
    improved = improve(constant_model, u, ImproveConfig(epsilon=0.01, epsilon1=0.1))

    assert climbed == pytest.approx([1.0, 1.5, 1.75])
    assert 2.0 - 1e-3 <= improved.evaluate(b) <= 2.0


def test_improve_inner_cap_warns(constant_model, grid, log_messages):
    """Test hitting the inner iteration cap still returns a dominating set."""
    points = grid(2, 1e-2)
    u = _anchored([0.0, 0.0], Belief.uniform(2))

    improved = improve(constant_model, u, ImproveConfig(max_inner_iterations=1))

    assert improved.evaluate(Belief.uniform(2)) == pytest.approx(1.0)
    assert np.all(improved.values_at(points) >= u.values_at(points) - 1e-7)
    assert any("inner loop" in message for message in log_messages)


def test_improve_recursion_cap_warns(constant_model, grid, log_messages):
    """Test hitting the recursion cap returns the merged set with a warning."""
    points = grid(2, 1e-2)
    u = _anchored([4.0, 0.0], Belief(np.array([0.3, 0.7])))

    improved = improve(constant_model, u, ImproveConfig(max_recursion_depth=1))

    assert sorted(map(tuple, improved.matrix.tolist())) == [(2.0, 2.0), (4.0, 0.0)]
    assert np.all(improved.values_at(points) >= u.values_at(points) - 1e-7)
    assert any("recursion depth" in message for message in log_messages)


def test_improve_stays_below_optimal_value(random_pomdp, grid_oracle):
    """Test improving a value-iteration iterate never overshoots the optimal value."""
    rng = np.random.default_rng(41)
    for _ in range(3):
        model = random_pomdp(rng, 2, 2, 2, discount=0.9)
        beliefs, optimal = grid_oracle(model, step=1e-3)
        u = dp_update(model, dp_update(model, VectorSet.zero(2)))

        improved = improve(model, u, ImproveConfig(epsilon=0.01, epsilon1=0.1))

        assert np.all(improved.values_at(beliefs) <= optimal + 1e-4)
