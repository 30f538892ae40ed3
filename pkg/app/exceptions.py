"""Error hierarchy for the solver."""


class PomdpError(Exception):
    """Base class for all solver errors."""


class PomdpParseError(PomdpError):
    """Model text could not be parsed or failed validation."""

    def __init__(self, message: str, line: int | None = None) -> None:
        self.line = line
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(f"{prefix}{message}")


class ModelValidationError(PomdpError):
    """A model, belief or vector violates a structural invariant."""


class ImpossibleObservationError(PomdpError):
    """Observation has zero probability under the given belief and action."""

    def __init__(self, action: int, observation: int, probability: float) -> None:
        self.action = action
        self.observation = observation
        self.probability = probability
        super().__init__(
            f"observation {observation} is impossible after action {action} "
            f"(P(z|b,a) = {probability:.3e})"
        )


class LPDegenerateError(PomdpError):
    """Simplex iteration exhausted its pivot budget."""

    def __init__(self, message: str, pivots: int, rows: int, cols: int) -> None:
        self.pivots = pivots
        self.rows = rows
        self.cols = cols
        super().__init__(f"{message} (pivots={pivots}, rows={rows}, cols={cols})")


class BackupIdentityError(PomdpError):
    """A backed-up vector disagrees with the one-step lookahead value at its belief."""
