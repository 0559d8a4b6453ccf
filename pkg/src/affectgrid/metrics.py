"""Observables computed from world snapshots."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from statistics import fmean
from typing import Sequence

from .dynamics import World
from .model import EMOTIONS, POSITIVE, Emotion, moore_neighbors


class EmptyPopulation(ValueError):
    pass


@dataclass(frozen=True)
class EmotionCensus:
    step: int
    counts: dict[Emotion, int]

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    def as_row(self) -> list[int]:
        return [self.counts[e] for e in EMOTIONS]


@dataclass(frozen=True)
class TrustReport:
    step: int
    means: dict[str, float]


@dataclass(frozen=True)
class ClusterSummary:
    emotion: Emotion
    num_clusters: float
    avg_size: float
    max_size: float


def emotion_census(world: World) -> EmotionCensus:
    counts = {e: 0 for e in EMOTIONS}
    for a in world.agents:
        counts[a.emotion] += 1
    return EmotionCensus(world.t, counts)


def positive_ratio(census: EmotionCensus) -> float:
    n = census.total
    if n == 0:
        raise EmptyPopulation("positive ratio of an empty population is undefined")
    return sum(census.counts[e] for e in POSITIVE) / n


def negative_ratio(census: EmotionCensus) -> float:
    return 1.0 - positive_ratio(census)


def find_clusters(world: World, emotion: Emotion) -> list[int]:
    """Sizes of connected same-emotion groups under toroidal Moore adjacency."""
    members = {a.id for a in world.agents if a.emotion == emotion}
    seen: set[int] = set()
    sizes = []
    for start in sorted(members):
        if start in seen:
            continue
        seen.add(start)
        size = 0
        queue = deque([start])
        while queue:
            aid = queue.popleft()
            size += 1
            for _, other in moore_neighbors(world.grid.positions[aid], world.grid):
                if other is not None and other in members and other not in seen:
                    seen.add(other)
                    queue.append(other)
        sizes.append(size)
    return sorted(sizes, reverse=True)


def cluster_summary(worlds: Sequence[World]) -> list[ClusterSummary]:
    """Average cluster statistics per emotion over the runs where it occurs.

    Runs in which an emotion is absent do not enter its denominators, and an
    emotion absent from every run gets no row.
    """
    if not worlds:
        raise ValueError("cluster_summary needs at least one run")
    out = []
    for e in EMOTIONS:
        per_run = [s for s in (find_clusters(w, e) for w in worlds) if s]
        if not per_run:
            continue
        out.append(
            ClusterSummary(
                emotion=e,
                num_clusters=fmean(len(s) for s in per_run),
                avg_size=fmean(fmean(s) for s in per_run),
                max_size=fmean(max(s) for s in per_run),
            )
        )
    return out


def trust_by_group(world: World) -> TrustReport:
    groups: dict[str, list[float]] = {}
    for a in world.agents:
        groups.setdefault(a.group, []).append(a.trust)
    return TrustReport(world.t, {g: fmean(v) for g, v in groups.items()})
