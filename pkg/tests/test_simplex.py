"""Test the dense simplex solver."""

import numpy as np
import pytest

from app.exceptions import LPDegenerateError
from app.lp import LPStatus, solve_simplex_lp


def test_simplex_optimal():
    """Test a textbook two-variable LP."""
    result = solve_simplex_lp(
        objective=np.array([3.0, 2.0]),
        a_ub=np.array([[1.0, 1.0], [1.0, 3.0], [1.0, 0.0]]),
        b_ub=np.array([4.0, 6.0, 3.0]),
    )

    assert result.status is LPStatus.OPTIMAL
    assert result.value == pytest.approx(11.0)
    np.testing.assert_allclose(result.x, [3.0, 1.0], atol=1e-9)


def test_simplex_equality_constraint():
    """Test equality rows go through phase one."""
    result = solve_simplex_lp(
        objective=np.array([1.0, 2.0]),
        a_eq=np.array([[1.0, 1.0]]),
        b_eq=np.array([1.0]),
    )

    assert result.status is LPStatus.OPTIMAL
    assert result.value == pytest.approx(2.0)
    np.testing.assert_allclose(result.x, [0.0, 1.0], atol=1e-9)


def test_simplex_negative_rhs():
    """Test a lower bound written as -x <= -1."""
    result = solve_simplex_lp(
        objective=np.array([-1.0]),
        a_ub=np.array([[-1.0], [1.0]]),
        b_ub=np.array([-1.0, 3.0]),
    )

    assert result.status is LPStatus.OPTIMAL
    assert result.value == pytest.approx(-1.0)
    np.testing.assert_allclose(result.x, [1.0], atol=1e-9)


def test_simplex_infeasible():
    """Test x <= -1 with x >= 0 is infeasible."""
    result = solve_simplex_lp(
        objective=np.array([1.0]),
        a_ub=np.array([[1.0]]),
        b_ub=np.array([-1.0]),
    )

    assert result.status is LPStatus.INFEASIBLE
    assert result.x is None


def test_simplex_unbounded():
    """Test an unconstrained maximization is unbounded."""
    result = solve_simplex_lp(
        objective=np.array([1.0, 0.0]),
        a_ub=np.array([[0.0, 1.0]]),
        b_ub=np.array([1.0]),
    )

    assert result.status is LPStatus.UNBOUNDED


def test_simplex_bland_rule_terminates_on_cycling_example():
    """Test Beale's degenerate LP terminates at its optimum."""
    result = solve_simplex_lp(
        objective=np.array([0.75, -20.0, 0.5, -6.0]),
        a_ub=np.array(
            [
                [0.25, -8.0, -1.0, 9.0],
                [0.5, -12.0, -0.5, 3.0],
                [0.0, 0.0, 1.0, 0.0],
            ]
        ),
        b_ub=np.array([0.0, 0.0, 1.0]),
    )

    assert result.status is LPStatus.OPTIMAL
    assert result.value == pytest.approx(1.25)


def test_simplex_redundant_equalities():
    """Test duplicated equality rows are dropped after phase one."""
    result = solve_simplex_lp(
        objective=np.array([1.0, 1.0]),
        a_ub=np.array([[1.0, 0.0]]),
        b_ub=np.array([0.25]),
        a_eq=np.array([[1.0, 1.0], [2.0, 2.0]]),
        b_eq=np.array([1.0, 2.0]),
    )

    assert result.status is LPStatus.OPTIMAL
    assert result.value == pytest.approx(1.0)


def test_simplex_pivot_budget():
    """Test an exhausted pivot budget raises."""
    with pytest.raises(LPDegenerateError) as exc_info:
        solve_simplex_lp(
            objective=np.array([3.0, 2.0]),
            a_ub=np.array([[1.0, 1.0], [1.0, 3.0]]),
            b_ub=np.array([4.0, 6.0]),
            max_pivots=0,
        )

    assert exc_info.value.pivots == 1
    assert exc_info.value.rows == 2


def test_simplex_matches_vertex_enumeration():
    """Test random bounded LPs against brute force over constraint intersections."""
    rng = np.random.default_rng(7)
    for _ in range(20):
        a_ub = rng.uniform(0.1, 2.0, size=(3, 2))
        b_ub = rng.uniform(1.0, 5.0, size=3)
        c = rng.uniform(-1.0, 2.0, size=2)

        rows = np.vstack([a_ub, -np.eye(2)])
        rhs = np.concatenate([b_ub, np.zeros(2)])
        best = -np.inf
        for i in range(len(rows)):
            for j in range(i + 1, len(rows)):
                block = rows[[i, j]]
                if abs(np.linalg.det(block)) < 1e-12:
                    continue
                point = np.linalg.solve(block, rhs[[i, j]])
                if np.all(rows @ point <= rhs + 1e-9):
                    best = max(best, float(c @ point))

        result = solve_simplex_lp(c, a_ub, b_ub)
        assert result.status is LPStatus.OPTIMAL
        assert result.value == pytest.approx(best, abs=1e-8)
