"""Alpha-vector policy file format.

Each vector is written as its action index on one line, its values on the next, then a
blank line.
"""

from pathlib import Path

import numpy as np
from loguru import logger

from app.exceptions import ModelValidationError, PomdpParseError
from app.vectors.alpha import AlphaVector, VectorSet


def format_alpha_vectors(vectors: VectorSet) -> str:
    blocks = []
    for member in vectors:
        action = -1 if member.action is None else member.action
        values = " ".join(repr(float(v)) for v in member.values)
        blocks.append(f"{action}\n{values}\n")
    return "\n".join(blocks)


def parse_alpha_vectors(text: str, n_states: int | None = None) -> VectorSet:
    lines = [
        (lineno, line.strip())
        for lineno, line in enumerate(text.splitlines(), start=1)
        if line.strip()
    ]
    if not lines:
        raise PomdpParseError("alpha file contains no vectors")
    if len(lines) % 2:
        raise PomdpParseError("alpha file ends with an action line and no values", lines[-1][0])

    members: list[AlphaVector] = []
    for (action_line, action_text), (values_line, values_text) in zip(
        lines[::2], lines[1::2], strict=True
    ):
        try:
            action = int(action_text)
        except ValueError as e:
            raise PomdpParseError(f"expected an action index, found '{action_text}'", action_line) from e
        try:
            values = np.array([float(v) for v in values_text.split()])
        except ValueError as e:
            raise PomdpParseError("expected vector values", values_line) from e
        if n_states is not None and values.size != n_states:
            raise ModelValidationError(
                f"line {values_line}: vector has {values.size} entries, model has {n_states} states"
            )
        members.append(AlphaVector(values, action=None if action < 0 else action))
    return VectorSet(members)


def write_alpha_file(path: Path | str, vectors: VectorSet) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(format_alpha_vectors(vectors))
    logger.info(f"Wrote {len(vectors)} alpha vectors to {path}")


def read_alpha_file(path: Path | str, n_states: int | None = None) -> VectorSet:
    return parse_alpha_vectors(Path(path).read_text(), n_states=n_states)
