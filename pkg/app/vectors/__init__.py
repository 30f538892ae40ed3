"""Alpha-vector sets."""

from app.vectors.alpha import AlphaVector, VectorSet, dominates_componentwise, offset_vectors
from app.vectors.io import (
    format_alpha_vectors,
    parse_alpha_vectors,
    read_alpha_file,
    write_alpha_file,
)
from app.vectors.prune import prune

__all__ = [
    "AlphaVector",
    "VectorSet",
    "dominates_componentwise",
    "format_alpha_vectors",
    "offset_vectors",
    "parse_alpha_vectors",
    "prune",
    "read_alpha_file",
    "write_alpha_file",
]
