"""Scenario configuration, its TOML file format, and the built-in scenarios.

Schema (all keys except ``name`` and ``composition`` optional)::

    name = "exp2-balanced"
    steps = 100
    replicates = 10
    seed = 0
    initial_emotions = "uniform"      # uniform | fixed | weighted
    initial_emotion = "neutral"       # used by "fixed"
    description = "..."

    [grid]
    width = 9
    height = 9

    [[composition]]
    profile = "kdef"
    count = 13

    [params]                          # StepParams fields
    alpha = 0.1

    [shocks]                          # presence enables shocks
    period = 10
    fraction = 0.2
    pool = ["angry", "disgust", "fear", "sad"]

    [initial_weights]                 # used by "weighted"
    happy = 1.0

    [profiles.kdef]                   # overrides the built-in profile
    accuracy = 0.96
    bias = 0.5
    # or: matrix = "measured_kdef.csv"  (relative to the config file)
"""

from __future__ import annotations

import dataclasses
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

import tomli_w

from .dynamics import ShockSchedule, StepParams
from .model import EMOTIONS, NEGATIVE, POSITIVE, Emotion
from .perception import (
    DEFAULT_PROFILES,
    ConfusionMatrix,
    load_confusion_matrix,
    synthesize_confusion_matrix,
)

INIT_MODES = ("uniform", "fixed", "weighted")
SCENARIO_DIR = Path(__file__).parent / "scenarios"


class ConfigError(ValueError):
    pass


class InfeasiblePlacement(ConfigError):
    pass


@dataclass(frozen=True)
class ProfileSpec:
    accuracy: Optional[float] = None
    bias: Optional[float] = None
    matrix: Optional[Path] = None

    def build(self, label: str) -> ConfusionMatrix:
        if self.matrix is not None:
            return load_confusion_matrix(self.matrix, label=label)
        acc, bias = DEFAULT_PROFILES.get(label, (None, None))
        acc = self.accuracy if self.accuracy is not None else acc
        bias = self.bias if self.bias is not None else bias
        if acc is None or bias is None:
            raise ConfigError(f"profile {label!r} needs accuracy and bias or a matrix file")
        return synthesize_confusion_matrix(acc, bias, label=label)


@dataclass(frozen=True)
class ScenarioConfig:
    name: str
    composition: tuple[tuple[str, int], ...] = (("kdef", 40),)
    width: int = 9
    height: int = 9
    steps: int = 100
    replicates: int = 10
    seed: int = 0
    params: StepParams = field(default_factory=StepParams)
    shocks: Optional[ShockSchedule] = None
    initial_emotions: str = "uniform"
    initial_emotion: Optional[Emotion] = None
    initial_weights: Optional[tuple[float, ...]] = None  # canonical order
    profiles: tuple[tuple[str, ProfileSpec], ...] = ()
    description: str = ""

    def __post_init__(self):
        comp = tuple((str(p), int(c)) for p, c in self.composition)
        object.__setattr__(self, "composition", comp)
        if not comp:
            raise ConfigError("composition is empty")
        if any(c < 0 for _, c in comp):
            raise ConfigError("composition counts must be non-negative")
        if len({p for p, _ in comp}) != len(comp):
            raise ConfigError("composition lists a profile twice")
        if self.width < 3 or self.height < 3:
            raise ConfigError("grid must be at least 3x3")
        if self.steps < 0:
            raise ConfigError("steps must be >= 0")
        if self.replicates < 1:
            raise ConfigError("replicates must be >= 1")
        if self.initial_emotions not in INIT_MODES:
            raise ConfigError(f"initial_emotions must be one of {INIT_MODES}")
        if self.initial_emotions == "fixed" and self.initial_emotion is None:
            raise ConfigError("initial_emotions = 'fixed' needs initial_emotion")
        if self.initial_emotions == "weighted":
            w = self.initial_weights
            if w is None or len(w) != len(EMOTIONS) or min(w) < 0 or sum(w) <= 0:
                raise ConfigError("initial_weights must give 7 non-negative weights, not all zero")

    @property
    def n_agents(self) -> int:
        return sum(c for _, c in self.composition)

    @property
    def groups(self) -> list[str]:
        return [p for p, _ in self.composition]

    def profile(self, label: str) -> ProfileSpec:
        return dict(self.profiles).get(label, ProfileSpec())

    def replace(self, **changes: Any) -> "ScenarioConfig":
        return dataclasses.replace(self, **changes)


def _exp3_weights() -> tuple[float, ...]:
    return tuple(1.0 if e in POSITIVE else 0.0 for e in EMOTIONS)


def builtin_scenarios() -> list[ScenarioConfig]:
    shocks = ShockSchedule()
    positive_start = dict(initial_emotions="weighted", initial_weights=_exp3_weights())
    return [
        ScenarioConfig("exp1-kdef", (("kdef", 40),), description="homogeneous KDEF"),
        ScenarioConfig("exp1-ck+", (("ck+", 40),), description="homogeneous CK+"),
        ScenarioConfig("exp1-jaffe", (("jaffe", 40),), description="homogeneous JAFFE"),
        ScenarioConfig(
            "exp2-kdef-jaffe", (("kdef", 20), ("jaffe", 20)), description="20 KDEF + 20 JAFFE"
        ),
        ScenarioConfig(
            "exp2-balanced",
            (("kdef", 13), ("ck+", 14), ("jaffe", 13)),
            description="13 KDEF + 14 CK+ + 13 JAFFE",
        ),
        ScenarioConfig(
            "exp2-skewed",
            (("kdef", 10), ("ck+", 20), ("jaffe", 10)),
            description="10 KDEF + 20 CK+ + 10 JAFFE",
        ),
        ScenarioConfig(
            "exp3-kdef", (("kdef", 40),), shocks=shocks,
            description="homogeneous KDEF under shocks", **positive_start,
        ),
        ScenarioConfig(
            "exp3-ck+", (("ck+", 40),), shocks=shocks,
            description="homogeneous CK+ under shocks", **positive_start,
        ),
        ScenarioConfig(
            "exp3-jaffe", (("jaffe", 40),), shocks=shocks,
            description="homogeneous JAFFE under shocks", **positive_start,
        ),
        ScenarioConfig(
            "exp3-skewed",
            (("kdef", 8), ("ck+", 16), ("jaffe", 16)),
            shocks=shocks,
            description="8 KDEF + 16 CK+ + 16 JAFFE under shocks",
            **positive_start,
        ),
        ScenarioConfig(
            "exp3-dominant",
            (("kdef", 24), ("ck+", 8), ("jaffe", 8)),
            shocks=shocks,
            description="24 KDEF + 8 CK+ + 8 JAFFE under shocks",
            **positive_start,
        ),
    ]


def get_scenario(name_or_path: str) -> ScenarioConfig:
    """Resolve a built-in scenario name or a path to a TOML file."""
    for cfg in builtin_scenarios():
        if cfg.name == name_or_path:
            return cfg
    path = Path(name_or_path)
    if path.suffix == ".toml" or path.exists():
        return load_scenario(path)
    names = ", ".join(c.name for c in builtin_scenarios())
    raise ConfigError(f"unknown scenario {name_or_path!r} (built-ins: {names})")


def scenario_to_dict(cfg: ScenarioConfig) -> dict[str, Any]:
    d: dict[str, Any] = {
        "name": cfg.name,
        "description": cfg.description,
        "steps": cfg.steps,
        "replicates": cfg.replicates,
        "seed": cfg.seed,
        "initial_emotions": cfg.initial_emotions,
    }
    if cfg.initial_emotion is not None:
        d["initial_emotion"] = cfg.initial_emotion.value
    d["grid"] = {"width": cfg.width, "height": cfg.height}
    d["composition"] = [{"profile": p, "count": c} for p, c in cfg.composition]
    d["params"] = dataclasses.asdict(cfg.params)
    if cfg.shocks is not None:
        d["shocks"] = {
            "period": cfg.shocks.period,
            "fraction": cfg.shocks.fraction,
            "pool": [e.value for e in cfg.shocks.emotion_pool],
        }
    if cfg.initial_weights is not None:
        d["initial_weights"] = {e.value: w for e, w in zip(EMOTIONS, cfg.initial_weights)}
    if cfg.profiles:
        profiles = {}
        for label, spec in cfg.profiles:
            entry: dict[str, Any] = {}
            if spec.matrix is not None:
                entry["matrix"] = str(spec.matrix)
            if spec.accuracy is not None:
                entry["accuracy"] = spec.accuracy
            if spec.bias is not None:
                entry["bias"] = spec.bias
            profiles[label] = entry
        d["profiles"] = profiles
    return d


def dump_scenario(cfg: ScenarioConfig) -> str:
    return tomli_w.dumps(scenario_to_dict(cfg))


def scenario_from_dict(d: dict[str, Any], base_dir: Path | None = None) -> ScenarioConfig:
    d = dict(d)
    known = {
        "name", "description", "steps", "replicates", "seed", "initial_emotions",
        "initial_emotion", "grid", "composition", "params", "shocks",
        "initial_weights", "profiles",
    }
    unknown = set(d) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    try:
        grid = d.get("grid", {})
        comp = tuple((c["profile"], int(c["count"])) for c in d["composition"])
        params = StepParams(**d.get("params", {}))
        shocks = None
        if "shocks" in d:
            s = dict(d["shocks"])
            pool = s.pop("pool", None)
            if pool is not None:
                s["emotion_pool"] = tuple(Emotion.parse(x) for x in pool)
            shocks = ShockSchedule(**s)
        weights = None
        if "initial_weights" in d:
            raw = {Emotion.parse(k): float(v) for k, v in d["initial_weights"].items()}
            weights = tuple(raw.get(e, 0.0) for e in EMOTIONS)
        profiles = []
        for label, p in d.get("profiles", {}).items():
            matrix = p.get("matrix")
            if matrix is not None:
                matrix = Path(matrix)
                if base_dir is not None and not matrix.is_absolute():
                    matrix = base_dir / matrix
            profiles.append((label, ProfileSpec(p.get("accuracy"), p.get("bias"), matrix)))
        init_e = d.get("initial_emotion")
        return ScenarioConfig(
            name=d["name"],
            composition=comp,
            width=int(grid.get("width", 9)),
            height=int(grid.get("height", 9)),
            steps=int(d.get("steps", 100)),
            replicates=int(d.get("replicates", 10)),
            seed=int(d.get("seed", 0)),
            params=params,
            shocks=shocks,
            initial_emotions=d.get("initial_emotions", "uniform"),
            initial_emotion=Emotion.parse(init_e) if init_e else None,
            initial_weights=weights,
            profiles=tuple(profiles),
            description=d.get("description", ""),
        )
    except ConfigError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"invalid scenario config: {exc}") from exc


def load_scenario(path: str | Path) -> ScenarioConfig:
    path = Path(path)
    try:
        data = tomllib.loads(path.read_text(encoding="utf-8"))
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    return scenario_from_dict(data, base_dir=path.parent)


def write_builtin_files(directory: Path = SCENARIO_DIR) -> list[Path]:
    directory.mkdir(parents=True, exist_ok=True)
    out = []
    for cfg in builtin_scenarios():
        p = directory / f"{cfg.name}.toml"
        p.write_text(dump_scenario(cfg), encoding="utf-8", newline="\n")
        out.append(p)
    return out
