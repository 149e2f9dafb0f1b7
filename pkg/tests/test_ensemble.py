"""Seeded ensembles, sweeps, and the crossover estimate."""

import math

import numpy as np
import pytest

from dollargame import ensemble as ens
from dollargame import serialize
from dollargame.config import SimulationConfig, SweepGrid
from dollargame.ensemble import CellFailure, estimate_crossover, run_ensemble, sweep


def small_config(**kw):
    base = dict(N=5, m=2, s=2, lam=1.0, d=100.0, P_f=100.0, max_steps=50)
    base.update(kw)
    return SimulationConfig(**base)


def test_zero_step_ensemble_is_all_undetermined():
    summary = run_ensemble(small_config(max_steps=0), R=1, master_seed=0)
    assert summary.f_undet == 1.0
    assert summary.f_spec == summary.f_fund == summary.f_abort == 0.0
    assert math.isnan(summary.mean_abs_o)


def test_worker_count_does_not_change_the_ensemble():
    config = small_config()
    one = run_ensemble(config, R=8, master_seed=3, workers=1)
    many = run_ensemble(config, R=8, master_seed=3, workers=4)
    assert serialize.write_summaries_csv([one]) == \
        serialize.write_summaries_csv([many])
    rows1 = serialize.write_csv([serialize.run_row(config, r) for r in one.runs])
    rows4 = serialize.write_csv([serialize.run_row(config, r) for r in many.runs])
    assert rows1 == rows4


def test_fractions_sum_to_one_and_intervals_cover_point_estimates():
    summary = run_ensemble(small_config(), R=16, master_seed=5)
    assert abs(sum(summary.fractions.values()) - 1.0) <= 1e-12
    for name, value in summary.fractions.items():
        lo, hi = summary.bootstrap_ci[name]
        assert lo <= value <= hi


def test_run_seeds_are_stable_and_distinct():
    config = small_config()
    a = ens.run_seed(0, config, 0).generate_state(4)
    b = ens.run_seed(0, config, 0).generate_state(4)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, ens.run_seed(0, config, 1).generate_state(4))
    assert not np.array_equal(a, ens.run_seed(1, config, 0).generate_state(4))
    other = small_config(N=7)
    assert not np.array_equal(a, ens.run_seed(0, other, 0).generate_state(4))


def test_single_cell_sweep_matches_run_ensemble():
    grid = SweepGrid(N_values=[5], m_values=[2], s_values=[2],
                     lam_values=[1.0], d_values=[100.0], P_f=100.0,
                     R=6, master_seed=9, max_steps=50)
    [from_sweep] = sweep(grid)
    direct = run_ensemble(grid.cells()[0], R=6, master_seed=9)
    assert serialize.write_summaries_csv([from_sweep]) == \
        serialize.write_summaries_csv([direct])


def test_sweep_covers_the_grid_in_canonical_order():
    grid = SweepGrid(N_values=[11, 5], m_values=[3, 2], s_values=[2],
                     lam_values=[1.0], d_values=[100.0], P_f=100.0,
                     R=3, master_seed=0, max_steps=40)
    summaries = sweep(grid)
    assert len(summaries) == 4
    assert [(s.config.m, s.config.N) for s in summaries] == \
        [(2, 5), (2, 11), (3, 5), (3, 11)]


def test_failed_cell_is_recorded_not_dropped(monkeypatch):
    from dollargame import engine

    real = engine.run_realization

    def flaky(config, seed, use_kernel=True):
        if config.N == 11:
            raise RuntimeError("injected failure")
        return real(config, seed, use_kernel)

    monkeypatch.setattr(ens, "run_realization", flaky)
    grid = SweepGrid(N_values=[5, 11], m_values=[2], s_values=[2],
                     lam_values=[1.0], d_values=[100.0], P_f=100.0,
                     R=2, master_seed=0, max_steps=20)
    summaries = sweep(grid)
    assert len(summaries) == 2
    good, bad = summaries
    assert good.config.N == 5 and not isinstance(good, CellFailure)
    assert isinstance(bad, CellFailure)
    assert "injected failure" in bad.error


def test_crossover_linear_interpolation():
    assert estimate_crossover([(0.1, 1.0), (0.3, 0.0)]) == pytest.approx(0.2)


def test_crossover_not_identifiable_without_a_bracket():
    assert estimate_crossover([(0.1, 0.9), (0.2, 0.8), (0.3, 0.6)]) is None


def test_crossover_three_point_example():
    # bracket is (0.2, 0.3); the interpolated crossing sits at
    # 0.2 + 0.1 * (0.6 - 0.5) / (0.6 - 0.1)
    est = estimate_crossover([(0.1, 0.9), (0.2, 0.6), (0.3, 0.1)])
    assert 0.2 < est < 0.3
    assert est == pytest.approx(0.22)


def test_crossover_accepts_unsorted_points_and_exact_hits():
    assert estimate_crossover([(0.3, 0.0), (0.1, 1.0)]) == pytest.approx(0.2)
    assert estimate_crossover([(0.1, 1.0), (0.2, 0.5), (0.3, 0.4)]) == 0.2
