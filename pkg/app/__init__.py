"""pomdp-vi1-solver: exact POMDP value iteration with point-based improvement."""

__version__ = "0.1.0"
