"""Temperature ratio and run/step phase classification."""

import pytest
from hypothesis import given
from hypothesis import strategies as st

from dollargame.phase import PhaseLabel, classify_run, classify_step, temperature


def test_temperature_examples():
    assert temperature(5, 101, 1) == pytest.approx(33 / 101)
    assert temperature(3, 11, 2) == pytest.approx(9 / 22)
    assert temperature(1, 1, 1) == 3.0


def test_temperature_pure_technical_variant():
    assert temperature(3, 11, 2, include_fundamental=False) == pytest.approx(8 / 22)


def test_temperature_rejects_non_positive_arguments():
    for bad in [(0, 1, 1), (1, 0, 1), (1, 1, 0)]:
        with pytest.raises(ValueError):
            temperature(*bad)


@given(m=st.integers(1, 12), N=st.integers(1, 500), s=st.integers(1, 20))
def test_temperature_monotonicity(m, N, s):
    t = temperature(m, N, s)
    assert temperature(m + 1, N, s) > t
    assert temperature(m, N + 1, s) < t
    assert temperature(m, N, s + 1) < t


def test_classify_step_examples():
    assert classify_step((100, 101, 102, 103), 3) is True
    assert classify_step((100, 101, 100, 101), 3) is False
    assert classify_step((100, 99, 98, 97), 3) is True


def test_classify_step_needs_enough_prices():
    with pytest.raises(ValueError):
        classify_step((100, 101, 102), 3)


@given(
    changes=st.lists(st.sampled_from((-1.0, 1.0, 2.0, -3.0)), min_size=3, max_size=8),
    scale=st.floats(0.5, 2.0),
)
def test_classify_step_is_scale_invariant(changes, scale):
    prices = [100.0]
    for c in changes:
        prices.append(prices[-1] + c)
    scaled = [scale * p for p in prices]
    assert classify_step(prices, 3) == classify_step(scaled, 3)


def test_constant_trajectory_is_fundamental():
    assert classify_run([100.0] * 20, 3, 100.0, 0) is PhaseLabel.FUNDAMENTAL


def test_monotone_trend_is_speculative_even_inside_the_band():
    prices = [100.0, 101.0, 102.0, 103.0, 104.0]
    assert classify_run(prices, 3, 100.0, 0) is PhaseLabel.SPECULATIVE


def test_flat_step_breaks_a_trend_run():
    prices = [100.0, 101.0, 102.0, 102.0, 103.0, 104.0]
    assert classify_run(prices, 3, 100.0, 0) is PhaseLabel.FUNDAMENTAL


def test_alternating_band_escape_is_undetermined():
    # growing-amplitude oscillation: leaves the 50% band without ever
    # producing m same-direction moves
    prices = [100.0, 160.0, 40.0, 170.0, 30.0, 180.0, 20.0]
    assert classify_run(prices, 3, 100.0, 0) is PhaseLabel.UNDETERMINED


def test_burn_in_excuses_an_early_band_excursion():
    prices = [100.0, 300.0, 100.0, 100.5, 101.0]
    assert classify_run(prices, 3, 100.0, 1) is PhaseLabel.FUNDAMENTAL
    assert classify_run(prices, 3, 100.0, 0) is PhaseLabel.UNDETERMINED


def test_empty_or_single_point_trajectory_is_undetermined():
    assert classify_run([], 3, 100.0, 0) is PhaseLabel.UNDETERMINED
    assert classify_run([100.0], 3, 100.0, 0) is PhaseLabel.UNDETERMINED
