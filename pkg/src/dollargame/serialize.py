"""Deterministic CSV/JSON serialization of runs and ensemble summaries.

All emitters produce byte streams with a fixed column order, floats
rendered with 17 significant digits (lossless for float64), LF line
endings, and a schema version column/field, so identical inputs always
serialize to identical bytes and round-trip losslessly.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass

from .config import SimulationConfig
from .ensemble import CellFailure, EnsembleSummary, RunSummary
from .errors import ConfigError
from .phase import PhaseLabel, temperature

CSV_SCHEMA_VERSION = 1


@dataclass
class RunRow:
    """One realization, flattened for the runs CSV."""

    schema: int
    N: int
    m: int
    s: int
    lam: float
    d: float
    P_f: float
    max_steps: int
    fundamental: bool
    early_stop: bool
    burn_in: int
    seed: int
    temperature: float
    label: str
    stop_step: int
    final_price: float
    mean_abs_o: float


RUN_COLUMNS = [
    "schema", "N", "m", "s", "lambda", "d", "P_f", "max_steps",
    "fundamental", "early_stop", "burn_in", "seed", "temperature",
    "label", "stop_step", "final_price", "mean_abs_o",
]

SUMMARY_COLUMNS = [
    "schema", "N", "m", "s", "lambda", "d", "P_f", "max_steps",
    "fundamental", "early_stop", "burn_in", "R", "master_seed",
    "temperature", "f_spec", "f_fund", "f_undet", "f_abort",
    "f_spec_lo", "f_spec_hi", "f_fund_lo", "f_fund_hi",
    "f_undet_lo", "f_undet_hi", "f_abort_lo", "f_abort_hi",
    "mean_abs_o", "error",
]


def fmt_float(x: float) -> str:
    return f"{x:.17g}"


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "on" if value else "off"
    if isinstance(value, float):
        return fmt_float(value)
    return str(value)


def run_row(config: SimulationConfig, run: RunSummary) -> RunRow:
    return RunRow(
        schema=CSV_SCHEMA_VERSION,
        N=config.N, m=config.m, s=config.s,
        lam=config.lam, d=config.d, P_f=config.P_f,
        max_steps=config.max_steps,
        fundamental=config.fundamental,
        early_stop=config.early_stop,
        burn_in=config.burn_in,
        seed=run.seed_id,
        temperature=temperature(config.m, config.N, config.s),
        label=run.label.value,
        stop_step=run.stop_step,
        final_price=run.final_price,
        mean_abs_o=run.mean_abs_o,
    )


def write_csv(rows: list[RunRow]) -> bytes:
    """Runs CSV; header always present, one line per realization."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(RUN_COLUMNS)
    for row in rows:
        writer.writerow([
            row.schema, row.N, row.m, row.s, _fmt(row.lam), _fmt(row.d),
            _fmt(row.P_f), row.max_steps, _fmt(row.fundamental),
            _fmt(row.early_stop), row.burn_in, row.seed,
            _fmt(row.temperature), row.label, row.stop_step,
            _fmt(row.final_price), _fmt(row.mean_abs_o),
        ])
    return buf.getvalue().encode("utf-8")


def read_csv(data: bytes) -> list[RunRow]:
    """Inverse of :func:`write_csv`."""
    text = data.decode("utf-8")
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header != RUN_COLUMNS:
        raise ConfigError(f"unexpected runs-CSV header: {header}")
    rows = []
    for rec in reader:
        values = dict(zip(RUN_COLUMNS, rec))
        rows.append(RunRow(
            schema=int(values["schema"]),
            N=int(values["N"]), m=int(values["m"]), s=int(values["s"]),
            lam=float(values["lambda"]), d=float(values["d"]),
            P_f=float(values["P_f"]), max_steps=int(values["max_steps"]),
            fundamental=values["fundamental"] == "on",
            early_stop=values["early_stop"] == "on",
            burn_in=int(values["burn_in"]), seed=int(values["seed"]),
            temperature=float(values["temperature"]),
            label=values["label"], stop_step=int(values["stop_step"]),
            final_price=float(values["final_price"]),
            mean_abs_o=float(values["mean_abs_o"]),
        ))
    return rows


def _config_fields(config: SimulationConfig) -> dict:
    return {
        "N": config.N, "m": config.m, "s": config.s,
        "lambda": config.lam, "d": config.d, "P_f": config.P_f,
        "max_steps": config.max_steps,
        "fundamental": config.fundamental,
        "early_stop": config.early_stop,
        "burn_in": config.burn_in,
    }


def summary_to_dict(summary: EnsembleSummary | CellFailure) -> dict:
    if isinstance(summary, CellFailure):
        return {
            "schema": CSV_SCHEMA_VERSION,
            "config": _config_fields(summary.config),
            "error": summary.error,
        }
    return {
        "schema": CSV_SCHEMA_VERSION,
        "config": _config_fields(summary.config),
        "R": summary.R,
        "master_seed": summary.master_seed,
        "temperature": summary.temperature,
        "f_spec": summary.f_spec,
        "f_fund": summary.f_fund,
        "f_undet": summary.f_undet,
        "f_abort": summary.f_abort,
        "mean_abs_o": None if math.isnan(summary.mean_abs_o)
        else summary.mean_abs_o,
        "bootstrap_ci": {k: list(v) for k, v in summary.bootstrap_ci.items()},
    }


def write_json(summary) -> bytes:
    """JSON for one summary or a list of summaries; deterministic bytes."""
    if isinstance(summary, (list, tuple)):
        payload = [summary_to_dict(s) for s in summary]
    else:
        payload = summary_to_dict(summary)
    return (json.dumps(payload, indent=2, allow_nan=False) + "\n").encode("utf-8")


def write_summaries_csv(summaries: list[EnsembleSummary | CellFailure]) -> bytes:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SUMMARY_COLUMNS)
    for s in summaries:
        cfg = s.config
        base = [
            CSV_SCHEMA_VERSION, cfg.N, cfg.m, cfg.s, _fmt(cfg.lam),
            _fmt(cfg.d), _fmt(cfg.P_f), cfg.max_steps, _fmt(cfg.fundamental),
            _fmt(cfg.early_stop), cfg.burn_in,
        ]
        if isinstance(s, CellFailure):
            tail = [""] * (len(SUMMARY_COLUMNS) - len(base) - 1) + [s.error]
        else:
            ci = s.bootstrap_ci
            tail = [
                s.R, s.master_seed, _fmt(s.temperature),
                _fmt(s.f_spec), _fmt(s.f_fund), _fmt(s.f_undet), _fmt(s.f_abort),
                _fmt(ci["f_spec"][0]), _fmt(ci["f_spec"][1]),
                _fmt(ci["f_fund"][0]), _fmt(ci["f_fund"][1]),
                _fmt(ci["f_undet"][0]), _fmt(ci["f_undet"][1]),
                _fmt(ci["f_abort"][0]), _fmt(ci["f_abort"][1]),
                _fmt(s.mean_abs_o), "",
            ]
        writer.writerow(base + tail)
    return buf.getvalue().encode("utf-8")


def read_summaries_csv(data: bytes) -> list[dict]:
    """Summaries CSV as dicts (numbers parsed); used by the plot command."""
    text = data.decode("utf-8")
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header != SUMMARY_COLUMNS:
        raise ConfigError(f"unexpected summaries-CSV header: {header}")
    out = []
    for rec in reader:
        row = dict(zip(SUMMARY_COLUMNS, rec))
        parsed = {
            "N": int(row["N"]), "m": int(row["m"]), "s": int(row["s"]),
            "lambda": float(row["lambda"]), "d": float(row["d"]),
            "P_f": float(row["P_f"]),
            "error": row["error"],
        }
        if not row["error"]:
            parsed.update(
                temperature=float(row["temperature"]),
                f_spec=float(row["f_spec"]),
                f_fund=float(row["f_fund"]),
                f_undet=float(row["f_undet"]),
                f_abort=float(row["f_abort"]),
                mean_abs_o=float(row["mean_abs_o"]),
            )
        out.append(parsed)
    return out
