from __future__ import annotations

import numpy as np
import pytest

from affectgrid.dynamics import World
from affectgrid.model import EMOTIONS, AgentState, Emotion, Grid, GridPos, place_agent
from affectgrid.perception import ConfusionMatrix, build_perception_table

_ACCEPTANCE: list[str] = []


def constant_matrix(target: Emotion, label: str = "const") -> ConfusionMatrix:
    rows = np.zeros((7, 7))
    rows[:, target.index] = 1.0
    return ConfusionMatrix(label, rows)


def identity_matrix(label: str = "ideal") -> ConfusionMatrix:
    return ConfusionMatrix(label, np.eye(7))


def build_world(width, height, specs, matrices, n_identities=None, seed=0, history_len=5):
    """specs: iterable of (x, y, emotion, group[, trust])."""
    grid = Grid(width, height)
    agents = []
    for i, spec in enumerate(specs):
        x, y, emotion, group = spec[:4]
        trust = spec[4] if len(spec) > 4 else 1.0
        pos = GridPos(x, y)
        place_agent(grid, i, pos)
        agents.append(AgentState(i, i, group, emotion, pos, trust, history_len))
    n_id = n_identities or max(1, len(agents))
    rng = np.random.default_rng(seed)
    tables = {g: build_perception_table(m, n_id, rng) for g, m in matrices.items()}
    return World(grid, agents, tables, dict(matrices))


@pytest.fixture
def acceptance_log():
    return _ACCEPTANCE


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE:
            terminalreporter.write_line(line)
