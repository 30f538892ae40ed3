"""Test witness LPs and set differences."""

import numpy as np
import pytest

from app.exceptions import ModelValidationError
from app.lp import find_witness, max_difference
from app.vectors import AlphaVector, VectorSet


def _set(*rows):
    return VectorSet([AlphaVector(np.array(row, dtype=float)) for row in rows])


def test_find_witness_empty_competitors():
    """Test any belief witnesses a vector against nothing."""
    result = find_witness(AlphaVector(np.array([1.0, 2.0])), VectorSet([], n_states=2))

    assert result is not None
    assert result.margin == float("inf")
    np.testing.assert_allclose(result.witness.probs, [0.5, 0.5])


def test_find_witness_corner():
    """Test [1, 0] beats [0, 1] best at the first corner."""
    result = find_witness(AlphaVector(np.array([1.0, 0.0])), _set([0.0, 1.0]))

    assert result is not None
    assert result.margin == pytest.approx(1.0)
    np.testing.assert_allclose(result.witness.probs, [1.0, 0.0], atol=1e-9)


def test_find_witness_interior():
    """Test a flat vector wins only around the middle of the simplex."""
    result = find_witness(AlphaVector(np.array([0.6, 0.6])), _set([1.0, 0.0], [0.0, 1.0]))

    assert result is not None
    assert result.margin == pytest.approx(0.1)
    np.testing.assert_allclose(result.witness.probs, [0.5, 0.5], atol=1e-9)


def test_find_witness_none_when_covered():
    """Test no witness exists for a vector under the envelope."""
    competitors = _set([1.0, 0.0], [0.0, 1.0])

    assert find_witness(AlphaVector(np.array([0.4, 0.4])), competitors) is None
    assert find_witness(AlphaVector(np.array([0.5, 0.5])), competitors) is None
    assert find_witness(AlphaVector(np.array([0.9, -1.0])), competitors) is None


def test_find_witness_dimension_mismatch():
    """Test mismatched dimensions raise."""
    with pytest.raises(ModelValidationError):
        find_witness(AlphaVector(np.array([1.0, 0.0, 0.0])), _set([0.0, 1.0]))


def test_max_difference_simple():
    """Test differences of hand-computed envelopes."""
    assert max_difference(_set([1.0, 1.0]), _set([0.0, 0.0])) == pytest.approx(1.0)
    assert max_difference(_set([2.0, 0.0], [0.0, 2.0]), _set([1.0, 1.0])) == pytest.approx(1.0)
    assert max_difference(_set([1.0, 1.0]), _set([2.0, 0.0], [0.0, 2.0])) == pytest.approx(1.0)
    assert max_difference(_set([1.0, 3.0]), _set([1.0, 3.0])) == 0.0


def test_max_difference_matches_grid(grid):
    """Test the LP difference against a dense grid on random sets."""
    rng = np.random.default_rng(11)
    for n_states, step in ((2, 1e-4), (3, 5e-3)):
        points = grid(n_states, step)
        for _ in range(10):
            upper = VectorSet([AlphaVector(v) for v in rng.uniform(0, 5, size=(4, n_states))])
            lower = VectorSet([AlphaVector(v) for v in rng.uniform(0, 5, size=(3, n_states))])
            on_grid = np.max(np.abs(upper.values_at(points) - lower.values_at(points)))

            exact = max_difference(upper, lower)

            assert exact >= on_grid - 1e-7
            assert exact <= on_grid + 10 * step


def test_max_difference_empty_set():
    """Test empty sets raise."""
    with pytest.raises(ModelValidationError):
        max_difference(VectorSet([], n_states=2), _set([1.0, 1.0]))


@pytest.mark.parametrize(("n_states", "step"), [(2, 1e-4), (3, 5e-3)])
def test_find_witness_agrees_with_grid(grid, n_states, step):
    """Test a witness exists exactly when the grid shows the candidate winning."""
    rng = np.random.default_rng(17 + n_states)
    points = grid(n_states, step)
    found = missing = 0
    for trial in range(40):
        competitors = VectorSet(
            [AlphaVector(v) for v in rng.uniform(0, 5, size=(3, n_states))]
        )
        if trial % 2:
            weights = rng.dirichlet(np.ones(len(competitors)))
            candidate = AlphaVector(weights @ competitors.matrix - rng.uniform(0, 0.5))
        else:
            candidate = AlphaVector(rng.uniform(0, 5, size=n_states))
        on_grid = np.max(points @ candidate.values - competitors.values_at(points))

        result = find_witness(candidate, competitors)

        if result is None:
            missing += 1
            assert on_grid <= 2e-9
        else:
            found += 1
            direct = candidate.dot(result.witness) - competitors.evaluate(result.witness)
            assert direct == pytest.approx(result.margin, abs=1e-7)
            assert result.margin >= on_grid - 1e-7
        if on_grid > 2e-9:
            assert result is not None
    assert found > 0
    assert missing > 0


def test_max_difference_symmetric_and_triangular():
    """Test the set difference is symmetric and obeys the triangle inequality."""
    rng = np.random.default_rng(23)
    for _ in range(20):
        n_states = int(rng.integers(2, 4))
        x, y, z = (
            VectorSet(
                [AlphaVector(v) for v in rng.uniform(0, 5, size=(rng.integers(1, 4), n_states))]
            )
            for _ in range(3)
        )

        assert max_difference(x, y) == pytest.approx(max_difference(y, x), abs=1e-7)
        assert max_difference(x, z) <= max_difference(x, y) + max_difference(y, z) + 1e-7
