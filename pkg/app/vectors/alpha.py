"""Alpha vectors and the piecewise-linear convex value functions they induce."""

from __future__ import annotations

import dataclasses
from collections.abc import Iterable, Iterator
from dataclasses import dataclass

import numpy as np

from app.exceptions import ModelValidationError
from app.model.pomdp import Belief

DUPLICATE_TOLERANCE = 1e-12
DOMINANCE_SLACK = 1e-12


@dataclass(frozen=True, eq=False)
class AlphaVector:
    """State-indexed value vector with the action and anchoring belief it came from."""

    values: np.ndarray
    action: int | None = None
    anchor: Belief | None = None

    def __post_init__(self) -> None:
        values = np.array(self.values, dtype=np.float64)
        if values.ndim != 1 or values.size == 0:
            raise ModelValidationError(f"alpha vector must be 1-D, got shape {values.shape}")
        if not np.all(np.isfinite(values)):
            raise ModelValidationError("alpha vector has non-finite entries")
        if self.anchor is not None and len(self.anchor) != values.size:
            raise ModelValidationError("anchor dimension does not match vector dimension")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def __len__(self) -> int:
        return int(self.values.size)

    def dot(self, b: Belief) -> float:
        return float(self.values @ b.probs)

    def with_anchor(self, anchor: Belief | None) -> AlphaVector:
        return dataclasses.replace(self, anchor=anchor)

    @classmethod
    def zeros(cls, n_states: int) -> AlphaVector:
        return cls(np.zeros(n_states))


class VectorSet:
    """Immutable ordered collection of alpha vectors.

    ``matrix`` stacks member values row-wise in insertion order.
    """

    __slots__ = ("members", "matrix")

    def __init__(self, members: Iterable[AlphaVector], n_states: int | None = None) -> None:
        self.members: tuple[AlphaVector, ...] = tuple(members)
        if self.members:
            dims = {len(member) for member in self.members}
            if len(dims) != 1:
                raise ModelValidationError(f"vector set mixes dimensions {sorted(dims)}")
            matrix = np.vstack([member.values for member in self.members])
        else:
            if n_states is None:
                raise ModelValidationError("an empty vector set needs an explicit dimension")
            matrix = np.zeros((0, n_states))
        if n_states is not None and matrix.shape[1] != n_states:
            raise ModelValidationError(f"vectors have {matrix.shape[1]} entries, expected {n_states}")
        matrix.setflags(write=False)
        self.matrix: np.ndarray = matrix

    @classmethod
    def zero(cls, n_states: int) -> VectorSet:
        """The set {0}, representing V = 0."""
        return cls([AlphaVector.zeros(n_states)])

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self) -> Iterator[AlphaVector]:
        return iter(self.members)

    def __getitem__(self, index: int) -> AlphaVector:
        return self.members[index]

    def __repr__(self) -> str:
        return f"VectorSet(size={len(self)}, n_states={self.n_states})"

    @property
    def n_states(self) -> int:
        return int(self.matrix.shape[1])

    def _require_members(self) -> None:
        if not self.members:
            raise ModelValidationError("operation needs a non-empty vector set")

    def evaluate(self, b: Belief) -> float:
        """Induced value ``max_alpha alpha.b``."""
        self._require_members()
        return float(np.max(self.matrix @ b.probs))

    def best_index(self, b: Belief) -> int:
        self._require_members()
        return int(np.argmax(self.matrix @ b.probs))

    def best_vector(self, b: Belief) -> AlphaVector:
        """Member maximizing ``alpha.b``; ties go to the lowest index."""
        return self.members[self.best_index(b)]

    def values_at(self, beliefs: np.ndarray) -> np.ndarray:
        """Induced value at each row of ``beliefs``."""
        self._require_members()
        return np.max(np.atleast_2d(beliefs) @ self.matrix.T, axis=1)

    def union(self, other: VectorSet) -> VectorSet:
        return VectorSet(self.members + other.members, n_states=self.n_states)

    def deduplicated(self) -> VectorSet:
        """Drop members equal (entrywise within 1e-12) to an earlier member."""
        kept: list[int] = []
        for i in range(len(self.members)):
            row = self.matrix[i]
            if kept and np.any(
                np.all(np.abs(self.matrix[kept] - row) <= DUPLICATE_TOLERANCE, axis=1)
            ):
                continue
            kept.append(i)
        return VectorSet([self.members[i] for i in kept], n_states=self.n_states)


def dominates_componentwise(alpha: AlphaVector, beta: AlphaVector) -> bool:
    """True when alpha(s) >= beta(s) for every state, within 1e-12."""
    if len(alpha) != len(beta):
        raise ModelValidationError("vectors have different dimensions")
    return bool(np.all(alpha.values >= beta.values - DOMINANCE_SLACK))


def offset_vectors(vectors: VectorSet, offset: float) -> VectorSet:
    """Add ``offset`` to every component of every member.

    Shifting every reward by C moves each value by C/(1-discount); this is how vector sets
    move between shifted and original reward units.
    """
    return VectorSet(
        [dataclasses.replace(member, values=member.values + offset) for member in vectors],
        n_states=vectors.n_states,
    )
