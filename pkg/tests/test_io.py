"""Config parsing, CSV/JSON serialization, SVG emitters."""

import json
import xml.etree.ElementTree as ET

import pytest

from dollargame import plots, serialize
from dollargame.config import (
    SimulationConfig,
    SweepGrid,
    load_document,
    parse_config,
)
from dollargame.ensemble import run_ensemble, sweep
from dollargame.errors import ConfigError

MINIMAL = """
N = 11
m = 3
s = 2
lambda = 1
d = 100
P_f = 100
"""


def test_minimal_config_gets_protocol_defaults():
    doc = load_document(MINIMAL)
    config = doc.single()
    assert isinstance(config, SimulationConfig)
    assert config.max_steps == 1600  # 200 * 2^m
    assert config.burn_in == 8
    assert doc.R == 200
    assert config.fundamental and config.early_stop


def test_parse_config_returns_a_grid_for_list_values():
    grid = parse_config(MINIMAL.replace("m = 3", "m = 3, 5, 8"))
    assert isinstance(grid, SweepGrid)
    assert grid.m_values == [3, 5, 8]
    assert grid.n_cells == 3


def test_zero_liquidity_is_a_range_error():
    with pytest.raises(ConfigError, match="lambda"):
        load_document(MINIMAL.replace("lambda = 1", "lambda = 0"))


def test_unknown_key_is_named_with_its_line():
    with pytest.raises(ConfigError, match=r"line .*momentum"):
        load_document(MINIMAL + "momentum: 3\n")


def test_duplicate_and_malformed_lines_are_rejected():
    with pytest.raises(ConfigError, match="duplicate"):
        load_document(MINIMAL + "N = 12\n")
    with pytest.raises(ConfigError, match="key = value"):
        load_document(MINIMAL + "what even is this\n")


def test_missing_required_keys_are_listed():
    with pytest.raises(ConfigError, match="P_f"):
        load_document("N=1\nm=1\ns=1\nlambda=1\nd=1\n")


def test_unsupported_schema_version_is_rejected():
    with pytest.raises(ConfigError, match="schema"):
        load_document(MINIMAL + "schema = 99\n")


def test_comments_and_colon_syntax_parse():
    doc = load_document("# header\nN: 11\nm: 3  # inline\ns: 2\n"
                        "lambda: 1\nd: 100\nP_f: 100\n")
    assert doc.single().N == 11


# ------------------------------------------------------------ CSV / JSON

@pytest.fixture(scope="module")
def small_summary():
    config = SimulationConfig(N=5, m=2, s=2, lam=1.0, d=100.0, P_f=100.0,
                              max_steps=50)
    return config, run_ensemble(config, R=6, master_seed=1)


def test_runs_csv_round_trips_byte_identically(small_summary):
    config, summary = small_summary
    rows = [serialize.run_row(config, r) for r in summary.runs]
    data = serialize.write_csv(rows)
    again = serialize.write_csv(serialize.read_csv(data))
    assert data == again


def test_empty_runs_csv_is_header_only():
    data = serialize.write_csv([])
    assert data.decode().splitlines() == [",".join(serialize.RUN_COLUMNS)]


def test_single_row_csv_has_two_lines(small_summary):
    config, summary = small_summary
    rows = [serialize.run_row(config, summary.runs[0])]
    assert len(serialize.write_csv(rows).decode().splitlines()) == 2


def test_summaries_csv_round_trips(small_summary):
    _, summary = small_summary
    data = serialize.write_summaries_csv([summary])
    [parsed] = serialize.read_summaries_csv(data)
    assert parsed["N"] == 5 and parsed["m"] == 2
    assert parsed["f_spec"] == summary.f_spec
    assert parsed["error"] == ""


def test_summary_json_is_strict_and_deterministic(small_summary):
    _, summary = small_summary
    data = serialize.write_json(summary)
    assert data == serialize.write_json(summary)
    payload = json.loads(data)
    assert payload["f_spec"] == summary.f_spec
    assert payload["config"]["lambda"] == 1.0


# ------------------------------------------------------------------ SVG

def _assert_well_formed(svg: str):
    root = ET.fromstring(svg)
    assert root.tag.endswith("svg")


def _row(f_spec, f_fund, error="", **params):
    base = dict(N=11, m=3, s=2, P_f=100.0, temperature=0.4,
                error=error, f_spec=f_spec, f_fund=f_fund)
    base["lambda"] = params.pop("lam", 1.0)
    base["d"] = params.pop("d", 100.0)
    base.update(params)
    return base


def test_cell_colors_follow_the_dominant_fraction():
    assert plots.cell_color(1.0, 0.0) == "rgb(0,0,255)"
    assert plots.cell_color(0.0, 1.0) == "rgb(255,0,0)"
    assert plots.cell_color(0.0, 0.0) == "rgb(255,255,255)"
    assert plots.cell_color(0.5, 0.0) == "rgb(128,128,255)"


def test_heatmap_paints_speculative_fundamental_and_empty_cells():
    rows = [
        _row(1.0, 0.0, lam=1.0),
        _row(0.0, 1.0, lam=10.0),
        _row(0.0, 0.0, lam=100.0),
        _row(0.0, 0.0, lam=1000.0, error="boom"),
    ]
    out = plots.emit_heatmap(rows, plots.HeatmapSpec(x="lambda", y="d"))
    [svg] = out.values()
    _assert_well_formed(svg)
    assert "rgb(0,0,255)" in svg
    assert "rgb(255,0,0)" in svg
    assert "rgb(255,255,255)" in svg
    assert 'url(#hatch)' in svg  # errored cell hatched
    assert "T=0.4" in svg


def test_heatmap_axes_must_be_distinct_and_known():
    with pytest.raises(ConfigError):
        plots.HeatmapSpec(x="lambda", y="lambda")
    with pytest.raises(ConfigError):
        plots.HeatmapSpec(x="volatility", y="d")


def test_heatmap_accepts_live_sweep_output():
    grid = SweepGrid(N_values=[5], m_values=[2, 3], s_values=[2],
                     lam_values=[1.0], d_values=[100.0], P_f=100.0,
                     R=3, master_seed=0, max_steps=30)
    out = plots.emit_heatmap(sweep(grid), plots.HeatmapSpec(x="lambda", y="d"))
    assert len(out) == 2  # one panel per m value
    for svg in out.values():
        _assert_well_formed(svg)


def test_trajectory_and_landscape_svgs_are_well_formed():
    from dollargame.glmodel import GLPolynomial

    _assert_well_formed(plots.emit_trajectory([100.0, 101.0, 99.0], 100.0))
    _assert_well_formed(plots.emit_landscape(
        GLPolynomial(alpha=-1.0, beta=2.0)))
