"""One simulation step: perceive, update trust, avoid, frustrate, contagion.

Reads within a step (perception, valence, contagion) use the emotions every
agent displayed at the start of the step. Movement is sequential against the
live grid, in a fresh random permutation of agents each step.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from .model import (
    EMOTIONS,
    NEGATIVE,
    POSITIVE,
    AgentState,
    Emotion,
    Grid,
    GridPos,
    moore_neighbors,
    relocate_agent,
)
from .perception import ConfusionMatrix, PerceptionTable, perceive, perceive_stochastic

TRUST_MODES = ("sequential", "batch")
PERCEPTION_MODES = ("frozen", "stochastic")


@dataclass(frozen=True)
class StepParams:
    alpha: float = 0.1
    tau_valence: int = -1
    tau_sad: float = 0.3
    tau_contagion: float = 0.7
    hysteresis_max: int = 2
    history_len: int = 5
    trust_mode: str = "sequential"
    perception_mode: str = "frozen"

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(f"alpha must be in (0, 1), got {self.alpha}")
        if int(self.tau_valence) != self.tau_valence:
            raise ValueError("tau_valence must be an integer")
        if not 0.0 <= self.tau_sad <= 1.0:
            raise ValueError(f"tau_sad must be in [0, 1], got {self.tau_sad}")
        if not 0.0 < self.tau_contagion <= 1.0:
            raise ValueError(f"tau_contagion must be in (0, 1], got {self.tau_contagion}")
        if self.hysteresis_max < 0:
            raise ValueError("hysteresis_max must be >= 0")
        if self.history_len < 1:
            raise ValueError("history_len must be >= 1")
        if self.trust_mode not in TRUST_MODES:
            raise ValueError(f"trust_mode must be one of {TRUST_MODES}")
        if self.perception_mode not in PERCEPTION_MODES:
            raise ValueError(f"perception_mode must be one of {PERCEPTION_MODES}")


@dataclass(frozen=True)
class ShockSchedule:
    period: int = 10
    fraction: float = 0.2
    emotion_pool: tuple[Emotion, ...] = tuple(e for e in EMOTIONS if e in NEGATIVE)

    def __post_init__(self):
        if self.period < 1:
            raise ValueError("shock period must be >= 1")
        if not 0.0 < self.fraction <= 1.0:
            raise ValueError(f"shock fraction must be in (0, 1], got {self.fraction}")
        if not self.emotion_pool:
            raise ValueError("shock emotion pool is empty")
        object.__setattr__(self, "emotion_pool", tuple(self.emotion_pool))


@dataclass(frozen=True)
class Move:
    step: int
    agent: int
    src: GridPos
    dst: GridPos
    dst_was_free: bool


@dataclass
class World:
    grid: Grid
    agents: list[AgentState]
    tables: dict[str, PerceptionTable]
    matrices: dict[str, ConfusionMatrix] = field(default_factory=dict)
    t: int = 0
    trace: Optional[list[Move]] = None

    @property
    def n(self) -> int:
        return len(self.agents)

    def move(self, agent: AgentState, to: GridPos) -> None:
        free = self.grid.is_free(to)
        relocate_agent(self.grid, agent.id, to)
        if self.trace is not None:
            self.trace.append(Move(self.t + 1, agent.id, agent.pos, to, free))
        agent.pos = to


def compute_valence(perceived: Iterable[Emotion]) -> int:
    return sum(1 if e in POSITIVE else -1 for e in perceived)


def update_trust(trust: float, errors: Sequence[int], alpha: float) -> float:
    """Exponential moving average, applied once per neighbor in order."""
    for d in errors:
        trust = (1.0 - alpha) * trust + alpha * (1 - d)
    return min(1.0, max(0.0, trust))


def update_trust_batch(trust: float, errors: Sequence[int], alpha: float) -> float:
    if not errors:
        return trust
    hit = 1.0 - sum(errors) / len(errors)
    return min(1.0, max(0.0, (1.0 - alpha) * trust + alpha * hit))


def frustration_switch(agent: AgentState, tau_sad: float) -> Emotion:
    return Emotion.SAD if agent.trust < tau_sad else agent.emotion


def contagion_candidate(perceived: Sequence[Emotion], tau_contagion: float) -> Optional[Emotion]:
    if not perceived:
        return None
    n = len(perceived)
    counts = Counter(perceived)
    # scan canonical order so ties (only possible when tau <= 0.5) resolve stably
    for e in EMOTIONS:
        if counts.get(e, 0) >= tau_contagion * n - 1e-12:
            return e
    return None


def hysteresis_allows(history: Iterable[Emotion], candidate: Emotion, hysteresis_max: int) -> bool:
    return sum(1 for e in history if e == candidate) <= hysteresis_max


def select_avoidance_move(
    agent: AgentState, grid: Grid, valence: int, tau_valence: int, rng: np.random.Generator
) -> Optional[GridPos]:
    if valence >= tau_valence:
        return None
    free = [p for p, occ in moore_neighbors(agent.pos, grid) if occ is None]
    if not free:
        return None
    return free[int(rng.integers(len(free)))]


def shock_count(n: int, fraction: float) -> int:
    return min(n, int(math.floor(fraction * n + 0.5)))


def apply_shock(
    agents: list[AgentState], schedule: ShockSchedule, t: int, rng: np.random.Generator
) -> list[AgentState]:
    if t < 1 or t % schedule.period != 0 or not agents:
        return agents
    k = shock_count(len(agents), schedule.fraction)
    chosen = rng.choice(len(agents), size=k, replace=False)
    pool = schedule.emotion_pool
    for i in chosen:
        a = agents[int(i)]
        a.emotion = pool[int(rng.integers(len(pool)))]
        a.remember(a.emotion)
    return agents


def step(
    world: World,
    params: StepParams,
    schedule: Optional[ShockSchedule],
    rng: np.random.Generator,
) -> World:
    agents = world.agents
    snapshot = [a.emotion for a in agents]
    stochastic = params.perception_mode == "stochastic"
    trust_update = update_trust if params.trust_mode == "sequential" else update_trust_batch

    for idx in rng.permutation(len(agents)):
        agent = agents[int(idx)]
        table = world.tables[agent.group]

        perceived: list[Emotion] = []
        errors: list[int] = []
        for _, other in moore_neighbors(agent.pos, world.grid):
            if other is None:
                continue
            shown = snapshot[other]
            if stochastic:
                seen = perceive_stochastic(world.matrices[agent.group], shown, rng)
            else:
                seen = perceive(table, agents[other].identity, shown)
            perceived.append(seen)
            errors.append(int(seen != shown))

        agent.trust = trust_update(agent.trust, errors, params.alpha)

        valence = compute_valence(perceived)
        dest = select_avoidance_move(agent, world.grid, valence, params.tau_valence, rng)
        if dest is not None:
            world.move(agent, dest)

        if agent.trust < params.tau_sad:
            agent.emotion = frustration_switch(agent, params.tau_sad)
        else:
            cand = contagion_candidate(perceived, params.tau_contagion)
            if cand is not None and hysteresis_allows(agent.history, cand, params.hysteresis_max):
                agent.emotion = cand
        agent.remember(agent.emotion)

    world.t += 1
    if schedule is not None:
        apply_shock(agents, schedule, world.t, rng)
    return world
