"""Emotion perception, trust decay and contagion among agents on a torus."""

__version__ = "0.1.0"

from .model import EMOTIONS, NEGATIVE, POSITIVE, AgentState, Emotion, Grid, GridPos  # noqa: E402
from .config import ScenarioConfig, builtin_scenarios, get_scenario, load_scenario  # noqa: E402
from .experiments import aggregate, run_replicates, run_simulation  # noqa: E402

__all__ = [
    "EMOTIONS",
    "NEGATIVE",
    "POSITIVE",
    "AgentState",
    "Emotion",
    "Grid",
    "GridPos",
    "ScenarioConfig",
    "aggregate",
    "builtin_scenarios",
    "get_scenario",
    "load_scenario",
    "run_replicates",
    "run_simulation",
]
