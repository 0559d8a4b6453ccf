"""CSV emission and the per-scenario output bundle."""

from __future__ import annotations

import hashlib
import json
from pathlib import Path
from typing import Iterable, Sequence

from . import __version__
from .config import ScenarioConfig, scenario_to_dict
from .experiments import Aggregate
from .metrics import ClusterSummary
from .model import EMOTIONS
from .seeding import derive_seed

TIMESERIES_HEADER = "step," + ",".join(e.value for e in EMOTIONS)
RESILIENCE_HEADER = "step,positive_ratio"
CLUSTER_HEADER = "emotion,condition,num_clusters,avg_size,max_size"
TRUST_PREFIX = "trust_"

CLUSTER_CONVENTION = (
    "per-emotion means over the runs in which the emotion is present at the final step; "
    "runs without it are excluded from the denominator"
)


def _write_lines(path: Path, lines: Iterable[str]) -> Path:
    path = Path(path)
    text = "".join(line + "\n" for line in lines)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    return path


def write_timeseries_csv(agg: Aggregate, path) -> Path:
    rows = [TIMESERIES_HEADER]
    for t, counts in zip(agg.steps, agg.census):
        rows.append(f"{t}," + ",".join(f"{v:.4f}" for v in counts))
    return _write_lines(path, rows)


def write_trust_csv(agg: Aggregate, path) -> Path:
    rows = ["step," + ",".join(TRUST_PREFIX + g for g in agg.groups)]
    for i, t in enumerate(agg.steps):
        rows.append(f"{t}," + ",".join(f"{agg.trust[g][i]:.4f}" for g in agg.groups))
    return _write_lines(path, rows)


def write_resilience_csv(agg: Aggregate, path) -> Path:
    rows = [RESILIENCE_HEADER]
    rows += [f"{t},{p:.4f}" for t, p in zip(agg.steps, agg.positive)]
    return _write_lines(path, rows)


def write_cluster_csv(summaries: Sequence[ClusterSummary], path, condition: str = "") -> Path:
    order = {e: i for i, e in enumerate(EMOTIONS)}
    rows = [CLUSTER_HEADER]
    for s in sorted(summaries, key=lambda s: order[s.emotion]):
        rows.append(
            f"{s.emotion.value},{condition},{s.num_clusters:.2f},{s.avg_size:.2f},{s.max_size:.2f}"
        )
    return _write_lines(path, rows)


def sha256_file(path: Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def write_bundle(cfg: ScenarioConfig, agg: Aggregate, out_dir, charts: bool = True) -> Path:
    """Write every CSV (and SVG chart) for one scenario plus its manifest."""
    from .plot import render_lineplot

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    files = [
        write_timeseries_csv(agg, out / "timeseries.csv"),
        write_trust_csv(agg, out / "trust.csv"),
        write_resilience_csv(agg, out / "resilience.csv"),
        write_cluster_csv(agg.clusters, out / "clusters.csv", condition=cfg.name),
    ]
    if charts:
        for stem in ("timeseries", "trust", "resilience"):
            files.append(render_lineplot(out / f"{stem}.csv", out / f"{stem}.svg"))

    config = scenario_to_dict(cfg)
    for entry in config.get("profiles", {}).values():
        if "matrix" in entry:
            entry["matrix_sha256"] = sha256_file(Path(entry["matrix"]))
    manifest = {
        "artifact": "affectgrid",
        "version": __version__,
        "scenario": config,
        "master_seed": cfg.seed,
        "run_seeds": [derive_seed(cfg.seed, "run", i) for i in range(agg.n_runs)],
        "table_seeds": {g: derive_seed(cfg.seed, "table", g) for g in cfg.groups},
        "cluster_averaging": CLUSTER_CONVENTION,
        "files": {f.name: sha256_file(f) for f in files},
    }
    path = out / "manifest.json"
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path
