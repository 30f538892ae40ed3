"""Configuration management using Pydantic Settings v2."""

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class LoggingConfig(BaseSettings):
    """Logging configuration."""

    level: str = Field(default="INFO", description="Log level")
    file: str | None = Field(default=None, description="Optional log file path")
    rotation: str = Field(default="100 MB", description="Log rotation size")
    retention: str = Field(default="7 days", description="Log retention period")
    json_format: bool = Field(default=False, description="Use JSON log format")


class SolverConfig(BaseSettings):
    """Value iteration defaults."""

    epsilon: float = Field(default=0.01, gt=0, description="Target optimality")
    epsilon1: float = Field(default=0.1, gt=0, lt=1, description="Inner improve stop factor")
    max_iterations: int = Field(default=1000, ge=1, description="Outer iteration cap")
    time_limit_seconds: float = Field(default=7200.0, gt=0, description="Wall-time cap")
    max_inner_iterations: int = Field(default=500, ge=1, description="Improve inner loop cap")
    max_recursion_depth: int = Field(default=50, ge=1, description="Improve recursion cap")
    all_actions_backup: bool = Field(
        default=False, description="Back up every action at each anchoring point"
    )
    check_backup_identity: bool = Field(
        default=False, description="Verify every backup against one-step lookahead"
    )


class SimulationConfig(BaseSettings):
    """Monte-Carlo policy evaluation defaults."""

    episodes: int = Field(default=10000, ge=1, description="Episodes per evaluation")
    seed: int = Field(default=0, ge=0, description="Root seed")
    truncation_bias: float = Field(
        default=1e-3, gt=0, description="Bound on the discarded tail of the discounted return"
    )
    belief_cache_size: int = Field(
        default=4096, ge=0, description="Entries kept in each greedy-policy memo (0 disables)"
    )


class Config(BaseSettings):
    """Main application configuration."""

    model_config = SettingsConfigDict(
        env_nested_delimiter="__",
        case_sensitive=False,
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore",
    )

    logging: LoggingConfig = Field(default_factory=LoggingConfig)
    solver: SolverConfig = Field(default_factory=SolverConfig)
    simulation: SimulationConfig = Field(default_factory=SimulationConfig)

    @classmethod
    def load(cls) -> "Config":
        """Load configuration from environment variables."""
        return cls()


config: Config = Config.load()
