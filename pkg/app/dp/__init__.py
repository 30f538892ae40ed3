"""Dynamic-programming update."""

from app.dp.incremental_pruning import cross_sum, dp_update, project

__all__ = ["cross_sum", "dp_update", "project"]
