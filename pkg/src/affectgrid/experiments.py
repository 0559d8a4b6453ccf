"""Building worlds from scenarios, running replicates and averaging them."""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from statistics import fmean
from typing import Optional

import numpy as np

from .config import InfeasiblePlacement, ScenarioConfig
from .dynamics import World, step
from .metrics import (
    ClusterSummary,
    EmotionCensus,
    TrustReport,
    cluster_summary,
    emotion_census,
    positive_ratio,
    trust_by_group,
)
from .model import EMOTIONS, AgentState, Grid, GridPos, place_agent
from .perception import build_perception_table
from .seeding import make_rng


class LengthMismatch(ValueError):
    pass


@dataclass
class RunResult:
    run_index: int
    census: list[EmotionCensus]
    trust: list[TrustReport]
    positive: list[float]
    final: World


@dataclass
class Aggregate:
    name: str
    groups: list[str]
    steps: list[int]
    census: np.ndarray  # (T+1, 7) mean counts, canonical emotion order
    trust: dict[str, list[float]]
    positive: list[float]
    clusters: list[ClusterSummary]
    n_runs: int


def _initial_emotions(cfg: ScenarioConfig, n: int, rng: np.random.Generator) -> list:
    if cfg.initial_emotions == "fixed":
        return [cfg.initial_emotion] * n
    if cfg.initial_emotions == "weighted":
        w = np.asarray(cfg.initial_weights, dtype=float)
        idx = rng.choice(len(EMOTIONS), size=n, p=w / w.sum())
    else:
        idx = rng.integers(len(EMOTIONS), size=n)
    return [EMOTIONS[int(i)] for i in idx]


def init_world(cfg: ScenarioConfig, rng: np.random.Generator) -> World:
    n = cfg.n_agents
    cells = cfg.width * cfg.height
    if n > cells:
        raise InfeasiblePlacement(f"{n} agents do not fit on {cfg.width}x{cfg.height} cells")

    matrices = {label: cfg.profile(label).build(label) for label in cfg.groups}
    # one frozen table per profile, shared by all runs under this master seed
    tables = {
        label: build_perception_table(m, max(n, 1), make_rng(cfg.seed, "table", label))
        for label, m in matrices.items()
    }

    grid = Grid(cfg.width, cfg.height)
    flat = rng.permutation(cells)[:n]
    emotions = _initial_emotions(cfg, n, rng)
    labels = [label for label, count in cfg.composition for _ in range(count)]
    agents = []
    for i in range(n):
        pos = GridPos(int(flat[i]) % cfg.width, int(flat[i]) // cfg.width)
        place_agent(grid, i, pos)
        agents.append(
            AgentState(
                id=i,
                identity=i,
                group=labels[i],
                emotion=emotions[i],
                pos=pos,
                trust=1.0,
                history_len=cfg.params.history_len,
            )
        )
    return World(grid, agents, tables, matrices)


def _record(result: RunResult, world: World) -> None:
    c = emotion_census(world)
    result.census.append(c)
    result.trust.append(trust_by_group(world))
    result.positive.append(positive_ratio(c) if c.total else 0.0)


def run_simulation(
    cfg: ScenarioConfig, run_index: int, trace: Optional[list] = None
) -> RunResult:
    rng = make_rng(cfg.seed, "run", run_index)
    world = init_world(cfg, rng)
    world.trace = trace
    result = RunResult(run_index, [], [], [], world)
    _record(result, world)
    for _ in range(cfg.steps):
        step(world, cfg.params, cfg.shocks, rng)
        _record(result, world)
    return result


def _run_one(args: tuple[ScenarioConfig, int]) -> RunResult:
    return run_simulation(*args)


def run_replicates(cfg: ScenarioConfig, parallel: int = 1) -> list[RunResult]:
    jobs = [(cfg, i) for i in range(cfg.replicates)]
    if parallel > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=parallel) as pool:
            results = list(pool.map(_run_one, jobs))
    else:
        results = [_run_one(j) for j in jobs]
    return sorted(results, key=lambda r: r.run_index)


def aggregate(results: list[RunResult], name: str = "") -> Aggregate:
    if not results:
        raise LengthMismatch("nothing to aggregate")
    lengths = {len(r.census) for r in results}
    if len(lengths) != 1:
        raise LengthMismatch(f"runs have differing lengths: {sorted(lengths)}")
    census = np.mean(
        [[c.as_row() for c in r.census] for r in results], axis=0, dtype=float
    )
    groups = list(results[0].trust[0].means)
    trust = {
        g: [fmean(r.trust[t].means[g] for r in results) for t in range(len(results[0].trust))]
        for g in groups
    }
    positive = [fmean(r.positive[t] for r in results) for t in range(len(results[0].positive))]
    return Aggregate(
        name=name,
        groups=groups,
        steps=[c.step for c in results[0].census],
        census=census,
        trust=trust,
        positive=positive,
        clusters=cluster_summary([r.final for r in results]),
        n_runs=len(results),
    )
