"""Point-based improvement."""

from app.improve.point_based import ImproveConfig, backup, improve, improve_step

__all__ = ["ImproveConfig", "backup", "improve", "improve_step"]
