"""Dense-tableau two-phase simplex with Bland's anti-cycling rule.

Solves ``maximize c.x`` subject to ``A_ub x <= b_ub``, ``A_eq x = b_eq`` and ``x >= 0``.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import StrEnum

import numpy as np

from app.exceptions import LPDegenerateError

LP_TOLERANCE = 1e-9


class LPStatus(StrEnum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


@dataclass(frozen=True)
class LPResult:
    """Outcome of one linear program."""

    status: LPStatus
    x: np.ndarray | None
    value: float | None
    pivots: int


class _Tableau:
    """Constraint rows followed by one objective row; last column is the right-hand side."""

    def __init__(self, matrix: np.ndarray, basis: list[int], tolerance: float, max_pivots: int):
        self.matrix = matrix
        self.basis = basis
        self.tolerance = tolerance
        self.max_pivots = max_pivots
        self.pivots = 0

    @property
    def rows(self) -> int:
        return self.matrix.shape[0] - 1

    def set_objective(self, costs: np.ndarray) -> None:
        """Install reduced costs for ``costs`` given the current basis."""
        objective = np.zeros(self.matrix.shape[1])
        objective[: costs.size] = costs
        for row, var in enumerate(self.basis):
            if var < costs.size and costs[var] != 0.0:
                objective -= costs[var] * self.matrix[row]
        self.matrix[-1] = objective

    def pivot(self, row: int, col: int) -> None:
        matrix = self.matrix
        matrix[row] /= matrix[row, col]
        factors = matrix[:, col].copy()
        factors[row] = 0.0
        matrix -= np.outer(factors, matrix[row])
        matrix[:, col] = 0.0
        matrix[row, col] = 1.0
        self.basis[row] = col
        self.pivots += 1
        if self.pivots > self.max_pivots:
            raise LPDegenerateError(
                "simplex exceeded its pivot budget",
                self.pivots,
                self.rows,
                matrix.shape[1] - 1,
            )

    def optimize(self, allowed: int) -> LPStatus:
        """Run primal simplex using only the first ``allowed`` columns as entering candidates."""
        matrix, tol = self.matrix, self.tolerance
        while True:
            reduced = matrix[-1, :allowed]
            candidates = np.nonzero(reduced > tol)[0]
            if candidates.size == 0:
                return LPStatus.OPTIMAL
            col = int(candidates[0])

            column = matrix[:-1, col]
            eligible = np.nonzero(column > tol)[0]
            if eligible.size == 0:
                return LPStatus.UNBOUNDED
            ratios = matrix[eligible, -1] / column[eligible]
            best = ratios.min()
            ties = eligible[ratios <= best + tol * max(1.0, abs(best))]
            row = int(min(ties, key=lambda r: self.basis[r]))
            self.pivot(row, col)

    def value(self) -> float:
        return float(-self.matrix[-1, -1])

    def solution(self, n_vars: int) -> np.ndarray:
        x = np.zeros(n_vars)
        for row, var in enumerate(self.basis):
            if var < n_vars:
                x[var] = self.matrix[row, -1]
        return np.clip(x, 0.0, None)


def solve_simplex_lp(
    objective: np.ndarray,
    a_ub: np.ndarray | None = None,
    b_ub: np.ndarray | None = None,
    a_eq: np.ndarray | None = None,
    b_eq: np.ndarray | None = None,
    tolerance: float = LP_TOLERANCE,
    max_pivots: int | None = None,
) -> LPResult:
    """Maximize ``objective.x`` over nonnegative ``x``.

    Raises:
        LPDegenerateError: when the pivot budget runs out
    """
    c = np.asarray(objective, dtype=np.float64)
    n = c.size
    a_ub = np.zeros((0, n)) if a_ub is None else np.atleast_2d(np.asarray(a_ub, dtype=np.float64))
    b_ub = np.zeros(0) if b_ub is None else np.asarray(b_ub, dtype=np.float64)
    a_eq = np.zeros((0, n)) if a_eq is None else np.atleast_2d(np.asarray(a_eq, dtype=np.float64))
    b_eq = np.zeros(0) if b_eq is None else np.asarray(b_eq, dtype=np.float64)

    m_ub, m_eq = a_ub.shape[0], a_eq.shape[0]
    m = m_ub + m_eq
    flip_ub = b_ub < 0
    flip_eq = b_eq < 0
    n_art = int(flip_ub.sum()) + m_eq
    n_cols = n + m_ub + n_art

    matrix = np.zeros((m + 1, n_cols + 1))
    basis: list[int] = []
    art = n + m_ub
    for i in range(m_ub):
        sign = -1.0 if flip_ub[i] else 1.0
        matrix[i, :n] = sign * a_ub[i]
        matrix[i, n + i] = sign
        matrix[i, -1] = sign * b_ub[i]
        if flip_ub[i]:
            matrix[i, art] = 1.0
            basis.append(art)
            art += 1
        else:
            basis.append(n + i)
    for k in range(m_eq):
        i = m_ub + k
        sign = -1.0 if flip_eq[k] else 1.0
        matrix[i, :n] = sign * a_eq[k]
        matrix[i, -1] = sign * b_eq[k]
        matrix[i, art] = 1.0
        basis.append(art)
        art += 1

    budget = max_pivots if max_pivots is not None else 50 * (m + n_cols + 1)
    tableau = _Tableau(matrix, basis, tolerance, budget)
    n_real = n + m_ub

    if n_art:
        phase_one = np.zeros(n_cols)
        phase_one[n_real:] = -1.0
        tableau.set_objective(phase_one)
        tableau.optimize(n_cols)
        if tableau.value() < -tolerance * max(1.0, float(np.abs(matrix[:-1, -1]).max())):
            return LPResult(LPStatus.INFEASIBLE, None, None, tableau.pivots)
        _drive_out_artificials(tableau, n_real)
        tableau.matrix = np.delete(tableau.matrix, np.s_[n_real:n_cols], axis=1)

    costs = np.zeros(n_real)
    costs[:n] = c
    tableau.set_objective(costs)
    status = tableau.optimize(n_real)
    if status is LPStatus.UNBOUNDED:
        return LPResult(status, None, None, tableau.pivots)
    return LPResult(status, tableau.solution(n), tableau.value(), tableau.pivots)


def _drive_out_artificials(tableau: _Tableau, n_real: int) -> None:
    """Pivot zero-level artificials out of the basis; drop rows that are redundant."""
    row = 0
    while row < tableau.rows:
        if tableau.basis[row] < n_real:
            row += 1
            continue
        entries = np.abs(tableau.matrix[row, :n_real])
        candidates = np.nonzero(entries > tableau.tolerance)[0]
        if candidates.size:
            tableau.pivot(row, int(candidates[0]))
            row += 1
        else:
            tableau.matrix = np.delete(tableau.matrix, row, axis=0)
            del tableau.basis[row]
