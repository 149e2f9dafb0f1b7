"""Seeded ensembles, parameter sweeps, and the crossover-temperature estimate.

Reproducibility scheme: each realization gets its own ``SeedSequence`` built
from ``(master_seed, stream tag, run index, N, m, s, bits(lambda), bits(d),
bits(P_f))``, where ``bits(x)`` is the IEEE-754 bit pattern of the float.
Seeds therefore depend only on the master seed, the cell parameters and the
run index -- never on scheduling -- so results are bit-identical for any
worker count, and a single-cell sweep matches :func:`run_ensemble` exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from joblib import Parallel, delayed

from .config import SimulationConfig, SweepGrid
from .engine import RunResult, run_realization
from .phase import PhaseLabel, temperature

_STREAM_RUNS = 0
_STREAM_BOOTSTRAP = 1

BOOTSTRAP_RESAMPLES = 2000

FRACTION_FIELDS = {
    "f_spec": PhaseLabel.SPECULATIVE,
    "f_fund": PhaseLabel.FUNDAMENTAL,
    "f_undet": PhaseLabel.UNDETERMINED,
    "f_abort": PhaseLabel.ABORTED,
}


def _float_bits(x: float) -> int:
    return int(np.float64(x).view(np.uint64))


def _cell_entropy(master_seed: int, stream: int, config: SimulationConfig) -> list[int]:
    return [
        int(master_seed), stream, config.N, config.m, config.s,
        _float_bits(config.lam), _float_bits(config.d), _float_bits(config.P_f),
    ]


def run_seed(master_seed: int, config: SimulationConfig,
             run_index: int) -> np.random.SeedSequence:
    """Seed sequence for one realization of one cell."""
    return np.random.SeedSequence(
        _cell_entropy(master_seed, _STREAM_RUNS, config) + [run_index])


@dataclass
class RunSummary:
    """Slim per-realization record kept by the ensemble aggregator."""

    run_index: int
    seed_id: int  # first word of the seed sequence state, for reporting
    label: PhaseLabel
    stop_step: int
    trigger_step: int | None
    aborted_step: int | None
    final_price: float
    mean_abs_o: float
    mean_o: float
    sum_abs_o: float
    sum_o: float
    o_count: int
    n_fundamental_plays: int


@dataclass
class EnsembleSummary:
    config: SimulationConfig
    R: int
    master_seed: int
    temperature: float
    f_spec: float
    f_fund: float
    f_undet: float
    f_abort: float
    mean_abs_o: float
    bootstrap_ci: dict[str, tuple[float, float]]
    runs: list[RunSummary] = field(repr=False, default_factory=list)

    @property
    def fractions(self) -> dict[str, float]:
        return {name: getattr(self, name) for name in FRACTION_FIELDS}


@dataclass
class CellFailure:
    """Marker for a sweep cell whose ensemble raised an error."""

    config: SimulationConfig
    error: str


def _summarize_run(result: RunResult, run_index: int, seed_id: int) -> RunSummary:
    return RunSummary(
        run_index=run_index,
        seed_id=seed_id,
        label=result.label,
        stop_step=result.stop_step,
        trigger_step=result.trigger_step,
        aborted_step=result.aborted_step,
        final_price=result.final_price,
        mean_abs_o=result.mean_abs_o,
        mean_o=result.mean_o,
        sum_abs_o=result.sum_abs_o,
        sum_o=result.sum_o,
        o_count=result.o_count,
        n_fundamental_plays=result.n_fundamental_plays,
    )


def _run_one(config: SimulationConfig, master_seed: int,
             run_index: int) -> RunSummary:
    seq = run_seed(master_seed, config, run_index)
    seed_id = int(seq.generate_state(1, np.uint64)[0])
    result = run_realization(config, seq)
    return _summarize_run(result, run_index, seed_id)


def _run_one_safe(config: SimulationConfig, master_seed: int, run_index: int):
    """Like :func:`_run_one` but returns the error message instead of
    raising, so one bad sweep cell cannot take down the whole sweep."""
    try:
        return _run_one(config, master_seed, run_index)
    except Exception as exc:
        return f"run {run_index}: {exc}"


def _bootstrap_fractions(labels: list[PhaseLabel], master_seed: int,
                         config: SimulationConfig) -> dict[str, tuple[float, float]]:
    """95% percentile bootstrap intervals for each phase fraction."""
    rng = np.random.default_rng(np.random.SeedSequence(
        _cell_entropy(master_seed, _STREAM_BOOTSTRAP, config)))
    R = len(labels)
    codes = np.array([list(FRACTION_FIELDS.values()).index(l) for l in labels])
    idx = rng.integers(0, R, size=(BOOTSTRAP_RESAMPLES, R))
    resampled = codes[idx]
    ci = {}
    for k, name in enumerate(FRACTION_FIELDS):
        fracs = (resampled == k).mean(axis=1)
        lo, hi = np.percentile(fracs, [2.5, 97.5])
        ci[name] = (float(lo), float(hi))
    return ci


def run_ensemble(config: SimulationConfig, R: int, master_seed: int,
                 workers: int = 1) -> EnsembleSummary:
    """Run R independently seeded realizations and aggregate them.

    Realizations are independent work items; the output is identical for
    any ``workers`` value because seeds are pre-derived and aggregation
    happens in run-index order.
    """
    if R < 1:
        raise ValueError(f"R must be >= 1, got {R}")
    if workers == 1:
        runs = [_run_one(config, master_seed, i) for i in range(R)]
    else:
        runs = Parallel(n_jobs=workers)(
            delayed(_run_one)(config, master_seed, i) for i in range(R))
    return _aggregate(config, R, master_seed, runs)


def _aggregate(config, R, master_seed, runs) -> EnsembleSummary:
    counts = {name: 0 for name in FRACTION_FIELDS}
    sum_abs_o = 0.0
    o_count = 0
    for run in runs:
        for name, label in FRACTION_FIELDS.items():
            if run.label is label:
                counts[name] += 1
        sum_abs_o += run.sum_abs_o
        o_count += run.o_count
    labels = [run.label for run in runs]
    return EnsembleSummary(
        config=config,
        R=R,
        master_seed=master_seed,
        temperature=temperature(config.m, config.N, config.s),
        f_spec=counts["f_spec"] / R,
        f_fund=counts["f_fund"] / R,
        f_undet=counts["f_undet"] / R,
        f_abort=counts["f_abort"] / R,
        mean_abs_o=sum_abs_o / o_count if o_count else math.nan,
        bootstrap_ci=_bootstrap_fractions(labels, master_seed, config),
        runs=list(runs),
    )


def sweep(grid: SweepGrid, workers: int = 1) -> list[EnsembleSummary | CellFailure]:
    """One ensemble per grid cell, in canonical (m, N, s, lambda, d) order.

    A failing cell is recorded as a :class:`CellFailure`, never dropped.
    """
    cells = grid.cells()
    jobs = [(config, i) for config in cells for i in range(grid.R)]
    if workers == 1:
        flat = [_run_one_safe(config, grid.master_seed, i) for config, i in jobs]
    else:
        flat = Parallel(n_jobs=workers)(
            delayed(_run_one_safe)(config, grid.master_seed, i)
            for config, i in jobs)

    out: list[EnsembleSummary | CellFailure] = []
    for ci, config in enumerate(cells):
        runs = flat[ci * grid.R:(ci + 1) * grid.R]
        errors = [r for r in runs if isinstance(r, str)]
        if errors:
            out.append(CellFailure(config=config, error="; ".join(errors[:3])))
        else:
            out.append(_aggregate(config, grid.R, grid.master_seed, runs))
    return out


def estimate_crossover(summaries) -> float | None:
    """Temperature at which the interpolated f_spec crosses 0.5.

    Accepts EnsembleSummary objects or plain ``(temperature, f_spec)``
    pairs.  Uses piecewise-linear interpolation in T over the points sorted
    by temperature; returns None when no pair of adjacent points brackets
    0.5 (not identifiable).
    """
    points = []
    for item in summaries:
        if isinstance(item, EnsembleSummary):
            points.append((item.temperature, item.f_spec))
        else:
            t, f = item
            points.append((float(t), float(f)))
    points.sort()
    for (t0, f0), (t1, f1) in zip(points, points[1:]):
        if f0 == 0.5:
            return t0
        if (f0 - 0.5) * (f1 - 0.5) < 0:
            return t0 + (t1 - t0) * (f0 - 0.5) / (f0 - f1)
    if points and points[-1][1] == 0.5:
        return points[-1][0]
    return None
