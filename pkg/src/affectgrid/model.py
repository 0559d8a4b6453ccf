"""Domain types: emotions, the toroidal grid and agent state."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from typing import NamedTuple, Optional


class Emotion(str, Enum):
    # Declaration order is the canonical (alphabetical) order used for
    # matrix indexing and CSV columns.
    ANGRY = "angry"
    DISGUST = "disgust"
    FEAR = "fear"
    HAPPY = "happy"
    NEUTRAL = "neutral"
    SAD = "sad"
    SURPRISE = "surprise"

    @property
    def index(self) -> int:
        return _INDEX[self]

    @classmethod
    def parse(cls, name: str) -> "Emotion":
        try:
            return cls(name.strip().lower())
        except ValueError:
            raise ValueError(f"unknown emotion {name!r}") from None


EMOTIONS: tuple[Emotion, ...] = tuple(Emotion)
_INDEX = {e: i for i, e in enumerate(EMOTIONS)}

POSITIVE = frozenset({Emotion.HAPPY, Emotion.SURPRISE, Emotion.NEUTRAL})
NEGATIVE = frozenset({Emotion.ANGRY, Emotion.SAD, Emotion.FEAR, Emotion.DISGUST})

# row-major: dy outer, dx inner, centre excluded
MOORE_OFFSETS: tuple[tuple[int, int], ...] = tuple(
    (dx, dy) for dy in (-1, 0, 1) for dx in (-1, 0, 1) if (dx, dy) != (0, 0)
)


class GridError(Exception):
    pass


class OccupiedCell(GridError):
    pass


class NotAdjacent(GridError):
    pass


class GridPos(NamedTuple):
    x: int
    y: int


class Grid:
    """Torus of ``width`` x ``height`` cells holding at most one agent each."""

    def __init__(self, width: int, height: int):
        if width < 1 or height < 1:
            raise ValueError("grid dimensions must be positive")
        self.width = width
        self.height = height
        self.cells: dict[GridPos, int] = {}
        self.positions: dict[int, GridPos] = {}

    def wrap(self, x: int, y: int) -> GridPos:
        return GridPos(x % self.width, y % self.height)

    def occupant(self, pos: GridPos) -> Optional[int]:
        return self.cells.get(pos)

    def is_free(self, pos: GridPos) -> bool:
        return pos not in self.cells

    def adjacent(self, a: GridPos, b: GridPos) -> bool:
        return any(self.wrap(a.x + dx, a.y + dy) == b for dx, dy in MOORE_OFFSETS)

    def __len__(self) -> int:
        return len(self.cells)

    def copy(self) -> "Grid":
        g = Grid(self.width, self.height)
        g.cells = dict(self.cells)
        g.positions = dict(self.positions)
        return g


def moore_neighbors(pos: GridPos, grid: Grid) -> list[tuple[GridPos, Optional[int]]]:
    """The 8 surrounding cells of ``pos`` with their occupants (or None)."""
    if grid.width < 3 or grid.height < 3:
        raise ValueError("Moore neighborhoods need a grid of at least 3x3")
    out = []
    for dx, dy in MOORE_OFFSETS:
        p = grid.wrap(pos.x + dx, pos.y + dy)
        out.append((p, grid.cells.get(p)))
    return out


def place_agent(grid: Grid, agent_id: int, pos: GridPos) -> Grid:
    pos = grid.wrap(*pos)
    if pos in grid.cells:
        raise OccupiedCell(f"cell {tuple(pos)} is held by agent {grid.cells[pos]}")
    if agent_id in grid.positions:
        raise GridError(f"agent {agent_id} is already placed")
    grid.cells[pos] = agent_id
    grid.positions[agent_id] = pos
    return grid


def relocate_agent(grid: Grid, agent_id: int, to: GridPos) -> Grid:
    to = grid.wrap(*to)
    here = grid.positions[agent_id]
    if not grid.adjacent(here, to):
        raise NotAdjacent(f"{tuple(to)} is not a Moore neighbor of {tuple(here)}")
    if to in grid.cells:
        raise OccupiedCell(f"cell {tuple(to)} is held by agent {grid.cells[to]}")
    del grid.cells[here]
    grid.cells[to] = agent_id
    grid.positions[agent_id] = to
    return grid


@dataclass
class AgentState:
    id: int
    identity: int
    group: str
    emotion: Emotion
    pos: GridPos
    trust: float = 1.0
    history_len: int = 5
    history: deque = field(default=None, repr=False)  # type: ignore[assignment]

    def __post_init__(self):
        if self.history is None:
            self.history = deque(maxlen=self.history_len)
        elif self.history.maxlen != self.history_len:
            self.history = deque(self.history, maxlen=self.history_len)

    def remember(self, emotion: Emotion) -> None:
        self.history.append(emotion)


def check_occupancy(grid: Grid, agents: list[AgentState]) -> None:
    """Raise AssertionError unless grid occupancy and agent positions agree."""
    assert len(grid.cells) == len(agents) == len(grid.positions)
    for a in agents:
        assert grid.positions[a.id] == a.pos, f"agent {a.id} position drift"
        assert grid.cells[a.pos] == a.id, f"cell {a.pos} does not hold agent {a.id}"
