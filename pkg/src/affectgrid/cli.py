"""Command-line entry point.

Exit codes: 0 success, 2 usage, 3 configuration/parameter error, 4 I/O error.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

from .config import ConfigError, builtin_scenarios, get_scenario
from .experiments import aggregate, run_replicates
from .perception import PerceptionError, synthesize_confusion_matrix, write_confusion_matrix
from .plot import SchemaError, render_lineplot

EXIT_OK, EXIT_USAGE, EXIT_CONFIG, EXIT_IO = 0, 2, 3, 4

log = logging.getLogger("affectgrid")


def _u64(text: str) -> int:
    try:
        v = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in an unsigned 64-bit integer")
    return v


def _nonneg(text: str) -> int:
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError("must be >= 0")
    return v


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="affectgrid", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a scenario and write its output bundle")
    run.add_argument("--scenario", required=True, help="built-in name or path to a TOML file")
    run.add_argument("--seed", type=_u64, default=None)
    run.add_argument("--out", type=Path, default=None)
    run.add_argument("--runs", type=_positive, default=None)
    run.add_argument("--steps", type=_nonneg, default=None)
    run.add_argument("--parallel", type=_positive, default=1)
    run.add_argument("--no-charts", action="store_true")

    sub.add_parser("list-scenarios", help="list the built-in scenarios")

    syn = sub.add_parser("synth-matrix", help="write a synthesized confusion matrix CSV")
    syn.add_argument("--accuracy", type=float, required=True)
    syn.add_argument("--bias", type=float, required=True)
    syn.add_argument("--seed", type=_u64, default=0)
    syn.add_argument("--out", type=Path, required=True)

    plot = sub.add_parser("plot", help="render a CSV output as an SVG line chart")
    plot.add_argument("--in", dest="src", type=Path, required=True)
    plot.add_argument("--out", type=Path, required=True)
    return p


def parse_args(argv=None) -> argparse.Namespace:
    return build_parser().parse_args(argv)


def _cmd_run(args) -> int:
    from .output import write_bundle

    cfg = get_scenario(args.scenario)
    changes = {}
    if args.seed is not None:
        changes["seed"] = args.seed
    if args.runs is not None:
        changes["replicates"] = args.runs
    if args.steps is not None:
        changes["steps"] = args.steps
    cfg = cfg.replace(**changes)
    base = args.out or Path(os.environ.get("AFFECTGRID_OUT", "out"))
    log.info("running %s: %d runs x %d steps, seed %d", cfg.name, cfg.replicates, cfg.steps, cfg.seed)
    agg = aggregate(run_replicates(cfg, parallel=args.parallel), cfg.name)
    manifest = write_bundle(cfg, agg, base / cfg.name, charts=not args.no_charts)
    print(manifest.parent)
    return EXIT_OK


def _cmd_list(args) -> int:
    for cfg in builtin_scenarios():
        comp = " + ".join(f"{c} {p}" for p, c in cfg.composition)
        shock = " (shocks)" if cfg.shocks else ""
        print(f"{cfg.name:16s} {comp}{shock}")
    return EXIT_OK


def _cmd_synth(args) -> int:
    # synthesis is deterministic; --seed is accepted for interface stability
    m = synthesize_confusion_matrix(args.accuracy, args.bias, label=args.out.stem)
    write_confusion_matrix(m, args.out)
    print(args.out)
    return EXIT_OK


def _cmd_plot(args) -> int:
    render_lineplot(args.src, args.out)
    print(args.out)
    return EXIT_OK


COMMANDS = {
    "run": _cmd_run,
    "list-scenarios": _cmd_list,
    "synth-matrix": _cmd_synth,
    "plot": _cmd_plot,
}


def main(argv=None) -> int:
    try:
        args = parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0) and EXIT_USAGE
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return COMMANDS[args.command](args)
    except (ConfigError, PerceptionError, SchemaError, ValueError) as exc:
        print(f"affectgrid: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"affectgrid: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
