"""Linear programs over the belief simplex."""

from app.lp.simplex import LP_TOLERANCE, LPResult, LPStatus, solve_simplex_lp
from app.lp.witness import WITNESS_MARGIN, WitnessResult, advantage, find_witness, max_difference

__all__ = [
    "LP_TOLERANCE",
    "WITNESS_MARGIN",
    "LPResult",
    "LPStatus",
    "WitnessResult",
    "advantage",
    "find_witness",
    "max_difference",
    "solve_simplex_lp",
]
