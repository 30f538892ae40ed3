"""Reader and writer for the `.POMDP` model file format.

Supported subset:

- preamble: ``discount``, ``values: reward``, ``states``, ``actions``, ``observations``
  (count or name list) and ``start`` (``uniform``, a state, a probability row,
  ``start include:`` / ``start exclude:``)
- ``T: a : s : s' p``, ``T: a : s`` + row, ``T: a`` + matrix / ``identity`` / ``uniform``
- ``O:`` with the same shapes over (s', z)
- ``R: a : s : s' : z v``, ``R: a : s : s'`` + row over z, ``R: a : s`` + matrix over (s', z)

``*`` is accepted wherever an index is expected. Rewards given on (s, a, s', z) are
marginalized into r(s, a) once transitions and observations are known.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from loguru import logger

from app.exceptions import ModelValidationError, PomdpParseError
from app.model.pomdp import Pomdp

ROW_SUM_TOLERANCE = 1e-6

_NUMBER = re.compile(r"^[+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?$")
_INTEGER = re.compile(r"^\d+$")
_DIRECTIVES = {"discount", "values", "states", "actions", "observations", "start", "T", "O", "R"}


@dataclass
class _Token:
    text: str
    line: int


def _tokenize(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        content = raw.split("#", 1)[0]
        for piece in content.replace(":", " : ").split():
            tokens.append(_Token(piece, lineno))
    return tokens


class _Reader:
    """Recursive-descent reader over the token stream."""

    def __init__(self, text: str) -> None:
        self.tokens = _tokenize(text)
        self.pos = 0
        self.discount: float | None = None
        self.states: list[str] | None = None
        self.actions: list[str] | None = None
        self.observations: list[str] | None = None
        self.start: np.ndarray | None = None
        self.transition: np.ndarray | None = None
        self.observation: np.ndarray | None = None
        self.reward4: np.ndarray | None = None
        self.transition_lines: np.ndarray | None = None
        self.observation_lines: np.ndarray | None = None

    def _eof(self) -> bool:
        return self.pos >= len(self.tokens)

    def _last_line(self) -> int:
        return self.tokens[-1].line if self.tokens else 1

    def _peek(self, offset: int = 0) -> _Token | None:
        index = self.pos + offset
        return self.tokens[index] if index < len(self.tokens) else None

    def _next(self, expecting: str) -> _Token:
        token = self._peek()
        if token is None:
            raise PomdpParseError(f"unexpected end of file, expected {expecting}", self._last_line())
        self.pos += 1
        return token

    def _expect(self, text: str) -> _Token:
        token = self._next(f"'{text}'")
        if token.text != text:
            raise PomdpParseError(f"expected '{text}', found '{token.text}'", token.line)
        return token

    def _number(self) -> float:
        token = self._next("a number")
        if not _NUMBER.match(token.text):
            raise PomdpParseError(f"expected a number, found '{token.text}'", token.line)
        return float(token.text)

    def _numbers(self, count: int) -> np.ndarray:
        return np.array([self._number() for _ in range(count)])

    def _at_directive(self) -> bool:
        token = self._peek()
        if token is None:
            return True
        following = self._peek(1)
        if token.text == "start":
            return following is not None and following.text in {":", "include", "exclude"}
        return token.text in _DIRECTIVES and following is not None and following.text == ":"

    def _identifiers(self) -> list[_Token]:
        items: list[_Token] = []
        while not self._at_directive():
            items.append(self._next("an identifier"))
        return items

    def parse(self) -> Pomdp:
        while not self._eof():
            token = self._next("a directive")
            match token.text:
                case "discount":
                    self._expect(":")
                    self.discount = self._number()
                case "values":
                    self._expect(":")
                    kind = self._next("'reward'")
                    if kind.text == "cost":
                        raise PomdpParseError(
                            "'values: cost' is not supported; negate costs into rewards",
                            kind.line,
                        )
                    if kind.text != "reward":
                        raise PomdpParseError(f"unknown values mode '{kind.text}'", kind.line)
                case "states" | "actions" | "observations":
                    self._expect(":")
                    self._declare(token)
                case "start":
                    self._parse_start(token)
                case "T":
                    self._parse_transition(token)
                case "O":
                    self._parse_observation(token)
                case "R":
                    self._parse_reward(token)
                case _:
                    raise PomdpParseError(f"unknown directive '{token.text}'", token.line)

        return self._build()

    def _declare(self, keyword: _Token) -> None:
        items = self._identifiers()
        if not items:
            raise PomdpParseError(f"'{keyword.text}' needs a count or a name list", keyword.line)
        if len(items) == 1 and _INTEGER.match(items[0].text):
            count = int(items[0].text)
            if count < 1:
                raise PomdpParseError(f"'{keyword.text}' count must be positive", items[0].line)
            names = [str(i) for i in range(count)]
        else:
            names = [item.text for item in items]
            if len(set(names)) != len(names):
                raise PomdpParseError(f"duplicate name in '{keyword.text}'", keyword.line)

        if keyword.text == "states":
            self.states = names
        elif keyword.text == "actions":
            self.actions = names
        else:
            self.observations = names

        if self.states and self.actions and self.observations and self.transition is None:
            n_s, n_a, n_z = len(self.states), len(self.actions), len(self.observations)
            self.transition = np.zeros((n_a, n_s, n_s))
            self.observation = np.zeros((n_a, n_s, n_z))
            self.reward4 = np.zeros((n_a, n_s, n_s, n_z))
            self.transition_lines = np.zeros((n_a, n_s), dtype=np.int64)
            self.observation_lines = np.zeros((n_a, n_s), dtype=np.int64)

    def _require_spaces(self, token: _Token) -> tuple[list[str], list[str], list[str]]:
        if self.states is None or self.actions is None or self.observations is None:
            raise PomdpParseError(
                f"'{token.text}' appears before states, actions and observations are declared",
                token.line,
            )
        return self.states, self.actions, self.observations

    def _index(self, names: list[str], kind: str) -> list[int]:
        token = self._next(f"a {kind}")
        if token.text == "*":
            return list(range(len(names)))
        if token.text in names:
            return [names.index(token.text)]
        if _INTEGER.match(token.text) and int(token.text) < len(names):
            return [int(token.text)]
        raise PomdpParseError(f"unknown {kind} '{token.text}'", token.line)

    def _colon_follows(self) -> bool:
        token = self._peek()
        return token is not None and token.text == ":"

    def _keyword_follows(self, *keywords: str) -> str | None:
        token = self._peek()
        if token is not None and token.text in keywords:
            self.pos += 1
            return token.text
        return None

    def _parse_start(self, keyword: _Token) -> None:
        states, _, _ = self._require_spaces(keyword)
        n_s = len(states)
        mode = self._keyword_follows("include", "exclude")
        self._expect(":")

        if mode is not None:
            chosen = set()
            for item in self._identifiers():
                if item.text in states:
                    chosen.add(states.index(item.text))
                elif _INTEGER.match(item.text) and int(item.text) < n_s:
                    chosen.add(int(item.text))
                else:
                    raise PomdpParseError(f"unknown state '{item.text}'", item.line)
            mask = np.zeros(n_s, dtype=bool)
            mask[list(chosen)] = True
            if mode == "exclude":
                mask = ~mask
            if not mask.any():
                raise PomdpParseError("start distribution selects no states", keyword.line)
            self.start = mask / mask.sum()
            return

        if self._keyword_follows("uniform"):
            self.start = np.full(n_s, 1.0 / n_s)
            return

        items = self._identifiers()
        if len(items) == 1 and (
            items[0].text in states
            or (_INTEGER.match(items[0].text) is not None and int(items[0].text) < n_s)
        ):
            item = items[0]
            index = states.index(item.text) if item.text in states else int(item.text)
            self.start = np.zeros(n_s)
            self.start[index] = 1.0
            return

        if len(items) != n_s or not all(_NUMBER.match(item.text) for item in items):
            raise PomdpParseError(
                f"start needs a state or {n_s} probabilities, found {len(items)} tokens",
                keyword.line,
            )
        row = np.array([float(item.text) for item in items])
        total = row.sum()
        if row.min() < 0 or abs(total - 1.0) > ROW_SUM_TOLERANCE:
            raise PomdpParseError(f"start distribution sums to {total}", keyword.line)
        self.start = row / total

    def _matrix(self, rows: int, cols: int, allow_identity: bool) -> np.ndarray:
        keyword = self._keyword_follows("identity", "uniform")
        if keyword == "uniform":
            return np.full((rows, cols), 1.0 / cols)
        if keyword == "identity":
            if not allow_identity or rows != cols:
                raise PomdpParseError("'identity' needs a square matrix", self.tokens[self.pos - 1].line)
            return np.eye(rows)
        return self._numbers(rows * cols).reshape(rows, cols)

    def _row(self, cols: int) -> np.ndarray:
        if self._keyword_follows("uniform"):
            return np.full(cols, 1.0 / cols)
        return self._numbers(cols)

    def _parse_transition(self, keyword: _Token) -> None:
        states, actions, _ = self._require_spaces(keyword)
        assert self.transition is not None and self.transition_lines is not None
        n_s = len(states)
        self._expect(":")
        acts = self._index(actions, "action")

        if not self._colon_follows():
            matrix = self._matrix(n_s, n_s, allow_identity=True)
            for a in acts:
                self.transition[a] = matrix
                self.transition_lines[a, :] = keyword.line
            return

        self._expect(":")
        starts = self._index(states, "state")
        if not self._colon_follows():
            row = self._row(n_s)
            for a in acts:
                for s in starts:
                    self.transition[a, s] = row
                    self.transition_lines[a, s] = keyword.line
            return

        self._expect(":")
        ends = self._index(states, "state")
        probability = self._number()
        for a in acts:
            for s in starts:
                self.transition[a, s, ends] = probability
                self.transition_lines[a, s] = keyword.line

    def _parse_observation(self, keyword: _Token) -> None:
        states, actions, observations = self._require_spaces(keyword)
        assert self.observation is not None and self.observation_lines is not None
        n_s, n_z = len(states), len(observations)
        self._expect(":")
        acts = self._index(actions, "action")

        if not self._colon_follows():
            matrix = self._matrix(n_s, n_z, allow_identity=True)
            for a in acts:
                self.observation[a] = matrix
                self.observation_lines[a, :] = keyword.line
            return

        self._expect(":")
        ends = self._index(states, "state")
        if not self._colon_follows():
            row = self._row(n_z)
            for a in acts:
                for s in ends:
                    self.observation[a, s] = row
                    self.observation_lines[a, s] = keyword.line
            return

        self._expect(":")
        obs = self._index(observations, "observation")
        probability = self._number()
        for a in acts:
            for s in ends:
                self.observation[a, s, obs] = probability
                self.observation_lines[a, s] = keyword.line

    def _parse_reward(self, keyword: _Token) -> None:
        states, actions, observations = self._require_spaces(keyword)
        assert self.reward4 is not None
        n_s, n_z = len(states), len(observations)
        self._expect(":")
        acts = self._index(actions, "action")
        self._expect(":")
        starts = self._index(states, "state")

        if not self._colon_follows():
            matrix = self._numbers(n_s * n_z).reshape(n_s, n_z)
            for a in acts:
                for s in starts:
                    self.reward4[a, s] = matrix
            return

        self._expect(":")
        ends = self._index(states, "state")
        if not self._colon_follows():
            row = self._numbers(n_z)
            for a in acts:
                for s in starts:
                    for t in ends:
                        self.reward4[a, s, t] = row
            return

        self._expect(":")
        obs = self._index(observations, "observation")
        value = self._number()
        for a in acts:
            for s in starts:
                for t in ends:
                    self.reward4[a, s, t, obs] = value

    def _normalize_rows(self, table: np.ndarray, lines: np.ndarray, kind: str) -> np.ndarray:
        assert self.actions is not None and self.states is not None
        sums = table.sum(axis=2)
        for a, s in zip(*np.nonzero(np.abs(sums - 1.0) > ROW_SUM_TOLERANCE), strict=True):
            where = f"{kind} row for action '{self.actions[a]}' state '{self.states[s]}'"
            if not lines[a, s]:
                # point at the last directive for this table
                raise PomdpParseError(f"{where} is never specified", int(lines.max()) or None)
            raise PomdpParseError(f"{where} sums to {sums[a, s]:.9f}", int(lines[a, s]))
        if table.min() < 0.0:
            raise PomdpParseError(f"{kind} table has a negative probability")
        return table / sums[:, :, None]

    def _build(self) -> Pomdp:
        if self.discount is None:
            raise PomdpParseError("missing 'discount' directive", self._last_line())
        for name, value in (
            ("states", self.states),
            ("actions", self.actions),
            ("observations", self.observations),
        ):
            if value is None:
                raise PomdpParseError(f"missing '{name}' directive", self._last_line())
        assert self.transition is not None and self.observation is not None
        assert self.reward4 is not None
        assert self.transition_lines is not None and self.observation_lines is not None
        assert self.states is not None and self.actions is not None
        assert self.observations is not None

        transition = self._normalize_rows(self.transition, self.transition_lines, "transition")
        observation = self._normalize_rows(self.observation, self.observation_lines, "observation")
        reward = np.einsum("ast,atz,astz->sa", transition, observation, self.reward4)

        try:
            return Pomdp(
                state_names=tuple(self.states),
                action_names=tuple(self.actions),
                observation_names=tuple(self.observations),
                reward=reward,
                transition=transition,
                observation=observation,
                discount=self.discount,
                start=self.start,
            )
        except ModelValidationError as e:
            raise PomdpParseError(str(e)) from e


def parse_pomdp(text: str) -> Pomdp:
    """Parse `.POMDP` text into a validated model with no reward shift."""
    return _Reader(text).parse()


def load_pomdp(path: Path | str) -> Pomdp:
    model = parse_pomdp(Path(path).read_text())
    logger.info(f"Loaded {path}: {model.describe()}")
    return model


def _names_line(keyword: str, names: tuple[str, ...]) -> str:
    if names == tuple(str(i) for i in range(len(names))):
        return f"{keyword}: {len(names)}"
    return f"{keyword}: {' '.join(names)}"


def _fmt(values: np.ndarray) -> str:
    return " ".join(repr(float(v)) for v in values)


def serialize_pomdp(model: Pomdp) -> str:
    """Write a model in the supported subset.

    Rewards are written per (a, s) with wildcards, so the shift offset is baked into them.
    """
    lines = [
        f"discount: {model.discount!r}",
        "values: reward",
        _names_line("states", model.state_names),
        _names_line("actions", model.action_names),
        _names_line("observations", model.observation_names),
        f"start: {_fmt(model.start_belief.probs)}",
        "",
    ]
    for a, action in enumerate(model.action_names):
        lines.append(f"T: {action}")
        lines.extend(_fmt(row) for row in model.transition[a])
        lines.append("")
    for a, action in enumerate(model.action_names):
        lines.append(f"O: {action}")
        lines.extend(_fmt(row) for row in model.observation[a])
        lines.append("")
    for a, action in enumerate(model.action_names):
        for s, state in enumerate(model.state_names):
            lines.append(f"R: {action} : {state} : * : * {float(model.reward[s, a])!r}")
    return "\n".join(lines) + "\n"
