"""Command-line entry points.

Subcommands: ``run`` (one realization), ``ensemble`` (R seeded
realizations), ``sweep`` (grid of ensembles plus heatmaps), ``gl-fit``
(fit the free-profit landscape to ensemble order-parameter samples), and
``plot`` (heatmaps from a previously written summaries CSV).

Exit codes: 0 success, 1 runtime error, 2 configuration error.  All
randomness derives from ``--seed``.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import ensemble as ens
from . import glmodel, plots, serialize
from .config import ConfigDocument, load_document
from .engine import run_realization
from .errors import ConfigError, DollarGameError
from .phase import temperature

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_CONFIG = 2


def _add_common(parser: argparse.ArgumentParser, needs_config=True):
    parser.add_argument("--config", required=needs_config,
                        help="path to a config file")
    parser.add_argument("--seed", type=int, default=0,
                        help="master seed (all randomness derives from it)")
    parser.add_argument("--out", required=True, help="output directory")
    parser.add_argument("--workers", type=int, default=1,
                        help="parallel worker processes")
    parser.add_argument("--format", choices=("csv", "json"), default="csv",
                        help="primary summary format")
    parser.add_argument("--no-early-stop", action="store_true",
                        help="run full-length trajectories")
    parser.add_argument("--fundamental", choices=("on", "off"),
                        help="override the fundamental-strategy switch")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dollar-game",
        description="Simulate and analyze the $-Game market model.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, helptext in [
        ("run", "one realization; trajectory CSV/SVG plus a run record"),
        ("ensemble", "R seeded realizations of one configuration"),
        ("sweep", "one ensemble per grid cell plus phase-diagram heatmaps"),
        ("gl-fit", "fit the quartic landscape to order-parameter samples"),
    ]:
        _add_common(sub.add_parser(name, help=helptext))
    plot = sub.add_parser("plot", help="heatmaps from a summaries CSV")
    plot.add_argument("--input", required=True,
                      help="summaries CSV written by `sweep`")
    plot.add_argument("--out", required=True, help="output directory")
    plot.add_argument("--x", default="lambda", help="heatmap x parameter")
    plot.add_argument("--y", default="d", help="heatmap y parameter")
    return parser


def _load(args) -> ConfigDocument:
    doc = load_document(Path(args.config))
    overrides = {}
    if args.no_early_stop:
        overrides["early_stop"] = False
    if args.fundamental is not None:
        overrides["fundamental"] = args.fundamental == "on"
    if overrides:
        doc = dataclasses.replace(
            doc, grid=dataclasses.replace(doc.grid, **overrides))
    doc.grid.master_seed = args.seed
    return doc


def _outdir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _cmd_run(args) -> int:
    doc = _load(args)
    config = dataclasses.replace(doc.single(), trajectory_detail="full")
    out = _outdir(args)
    result = run_realization(config, ens.run_seed(args.seed, config, 0))

    prices = [config.P_f] + list(result.prices)
    lines = ["t,price"]
    lines += [f"{t},{serialize.fmt_float(p)}" for t, p in enumerate(prices)]
    (out / "trajectory.csv").write_bytes(("\n".join(lines) + "\n").encode())
    (out / "trajectory.svg").write_text(plots.emit_trajectory(
        np.asarray(prices), config.P_f,
        title=f"N={config.N} m={config.m} s={config.s} seed={args.seed}"))

    summary = {
        "schema": serialize.CSV_SCHEMA_VERSION,
        "seed": args.seed,
        "label": result.label.value,
        "stop_step": result.stop_step,
        "trigger_step": result.trigger_step,
        "aborted_step": result.aborted_step,
        "final_price": None if not math.isfinite(result.final_price)
        else result.final_price,
        "mean_abs_o": None if math.isnan(result.mean_abs_o)
        else result.mean_abs_o,
        "n_fundamental_plays": result.n_fundamental_plays,
        "temperature": temperature(config.m, config.N, config.s),
    }
    (out / "run.json").write_bytes(
        (json.dumps(summary, indent=2, allow_nan=False) + "\n").encode())
    return EXIT_OK


def _cmd_ensemble(args) -> int:
    doc = _load(args)
    config = doc.single()
    out = _outdir(args)
    summary = ens.run_ensemble(config, doc.R, args.seed, workers=args.workers)
    rows = [serialize.run_row(config, run) for run in summary.runs]
    (out / "runs.csv").write_bytes(serialize.write_csv(rows))
    if args.format == "csv":
        (out / "summary.csv").write_bytes(
            serialize.write_summaries_csv([summary]))
    (out / "summary.json").write_bytes(serialize.write_json(summary))
    return EXIT_OK


def _cmd_sweep(args) -> int:
    doc = _load(args)
    out = _outdir(args)
    summaries = ens.sweep(doc.grid, workers=args.workers)
    (out / "summaries.csv").write_bytes(
        serialize.write_summaries_csv(summaries))
    if args.format == "json":
        (out / "summaries.json").write_bytes(serialize.write_json(summaries))
    spec = plots.HeatmapSpec(x=doc.heatmap_x, y=doc.heatmap_y)
    for name, svg in plots.emit_heatmap(summaries, spec).items():
        (out / f"heatmap_{name}.svg").write_text(svg)
    return EXIT_OK


def _cmd_gl_fit(args) -> int:
    doc = _load(args)
    out = _outdir(args)
    grid = doc.grid
    if doc.gl_samples == "per_step":
        grid = dataclasses.replace(grid, trajectory_detail="full")
    samples: list[float] = []
    for config in grid.cells():
        for i in range(grid.R):
            seq = ens.run_seed(args.seed, config, i)
            result = run_realization(config, seq)
            if doc.gl_samples == "per_step":
                post = result.imbalances[config.burn_in:]
                samples.extend((post / config.N).tolist())
            elif not math.isnan(result.mean_o):
                samples.append(result.mean_o)
    samples = [x for x in samples if math.isfinite(x)]
    poly = glmodel.fit_landscape(samples, bins=32)
    roots = glmodel.stationary_points(poly.alpha, poly.beta) \
        if poly.beta != 0 else (0.0,)
    payload = {
        "schema": serialize.CSV_SCHEMA_VERSION,
        "samples": len(samples),
        "sample_kind": doc.gl_samples,
        "coefficients": {"C": poly.C, "alpha": poly.alpha, "beta": poly.beta},
        "stationary_points": list(roots),
    }
    (out / "gl_fit.json").write_bytes(
        (json.dumps(payload, indent=2, allow_nan=False) + "\n").encode())
    (out / "gl_landscape.svg").write_text(plots.emit_landscape(poly))
    return EXIT_OK


def _cmd_plot(args) -> int:
    data = Path(args.input).read_bytes()
    summaries = serialize.read_summaries_csv(data)
    out = _outdir(args)
    spec = plots.HeatmapSpec(x=args.x, y=args.y)
    for name, svg in plots.emit_heatmap(summaries, spec).items():
        (out / f"heatmap_{name}.svg").write_text(svg)
    return EXIT_OK


_COMMANDS = {
    "run": _cmd_run,
    "ensemble": _cmd_ensemble,
    "sweep": _cmd_sweep,
    "gl-fit": _cmd_gl_fit,
    "plot": _cmd_plot,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (DollarGameError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
