"""Deterministic SVG emitters: phase-diagram heatmaps, trajectories, landscapes.

Heatmap color semantics: each cell is shaded white-to-blue by its
speculative fraction or white-to-red by its fundamental fraction, whichever
fraction dominates; a cell where both are zero stays white; cells missing
from the sweep are hatched rather than omitted.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .config import SWEEP_PARAMS
from .errors import ConfigError

CELL_W = 84
CELL_H = 56
MARGIN_LEFT = 90
MARGIN_TOP = 60
MARGIN_BOTTOM = 50
MARGIN_RIGHT = 30


@dataclass(frozen=True)
class HeatmapSpec:
    """Axes of the phase-diagram heatmap; remaining swept parameters become
    one SVG panel per value combination."""

    x: str = "lambda"
    y: str = "d"
    panels: tuple[str, ...] = field(default=())

    def __post_init__(self):
        names = (self.x, self.y) + tuple(self.panels)
        for name in names:
            if name not in SWEEP_PARAMS:
                raise ConfigError(f"unknown sweep parameter {name!r}")
        if len(set(names)) != len(names):
            raise ConfigError("heatmap axes and panel parameters must be distinct")


def _num(x: float) -> str:
    return f"{x:g}"


def cell_color(f_spec: float, f_fund: float) -> str:
    """White->blue by f_spec or white->red by f_fund; dominant hue wins."""
    if f_spec >= f_fund:
        v = min(max(f_spec, 0.0), 1.0)
        other = round(255 * (1.0 - v))
        return f"rgb({other},{other},255)"
    v = min(max(f_fund, 0.0), 1.0)
    other = round(255 * (1.0 - v))
    return f"rgb(255,{other},{other})"


def emit_heatmap(summaries, spec: HeatmapSpec) -> dict[str, str]:
    """Render sweep summaries as one SVG per panel combination.

    ``summaries`` are dicts as produced by
    :func:`dollargame.serialize.read_summaries_csv` (or the equivalent from
    :func:`dollargame.serialize.summary_to_dict` rows flattened); entries
    with a non-empty ``error`` and absent grid cells render hatched.
    """
    rows = []
    for s in summaries:
        if hasattr(s, "config"):  # EnsembleSummary / CellFailure
            from .serialize import summary_to_dict

            d = summary_to_dict(s)
            flat = dict(d["config"])
            flat["error"] = d.get("error", "")
            if not flat["error"]:
                flat.update(temperature=d["temperature"], f_spec=d["f_spec"],
                            f_fund=d["f_fund"])
            rows.append(flat)
        else:
            rows.append(dict(s))

    if not rows:
        raise ConfigError("no summaries to plot")
    for axis in (spec.x, spec.y):
        values = {r[axis] for r in rows}
        if len(values) < 1:
            raise ConfigError(f"sweep does not cover axis {axis!r}")

    x_vals = sorted({r[spec.x] for r in rows})
    y_vals = sorted({r[spec.y] for r in rows})
    panel_params = spec.panels or tuple(
        p for p in SWEEP_PARAMS
        if p not in (spec.x, spec.y) and len({r[p] for r in rows}) >= 1
    )
    panel_keys = sorted({tuple(r[p] for p in panel_params) for r in rows})

    out = {}
    for key in panel_keys:
        subset = [r for r in rows
                  if tuple(r[p] for p in panel_params) == key]
        by_cell = {(r[spec.x], r[spec.y]): r for r in subset}
        title = ", ".join(f"{p}={_num(v) if isinstance(v, float) else v}"
                          for p, v in zip(panel_params, key))
        name = "_".join(f"{p}{v:g}" if isinstance(v, float) else f"{p}{v}"
                        for p, v in zip(panel_params, key)) or "panel"
        out[name] = _render_panel(by_cell, x_vals, y_vals, spec, title)
    return out


def _render_panel(by_cell, x_vals, y_vals, spec, title) -> str:
    width = MARGIN_LEFT + CELL_W * len(x_vals) + MARGIN_RIGHT
    height = MARGIN_TOP + CELL_H * len(y_vals) + MARGIN_BOTTOM
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}"'
        f' height="{height}" viewBox="0 0 {width} {height}">',
        "<defs>"
        '<pattern id="hatch" width="8" height="8" patternUnits="userSpaceOnUse">'
        '<rect width="8" height="8" fill="white"/>'
        '<path d="M0,8 L8,0" stroke="#888" stroke-width="1"/>'
        "</pattern>"
        "</defs>",
        f'<text x="{width / 2:g}" y="24" text-anchor="middle"'
        f' font-family="sans-serif" font-size="14">{title}</text>',
    ]
    for yi, yv in enumerate(y_vals):
        for xi, xv in enumerate(x_vals):
            x0 = MARGIN_LEFT + xi * CELL_W
            # y axis grows upward: largest value on top
            y0 = MARGIN_TOP + (len(y_vals) - 1 - yi) * CELL_H
            row = by_cell.get((xv, yv))
            if row is None or row.get("error"):
                fill = "url(#hatch)"
                label = "n/a"
            else:
                fill = cell_color(row["f_spec"], row["f_fund"])
                label = f"T={row['temperature']:.3g}"
            parts.append(
                f'<rect x="{x0}" y="{y0}" width="{CELL_W}" height="{CELL_H}"'
                f' fill="{fill}" stroke="#333" stroke-width="1"/>')
            parts.append(
                f'<text x="{x0 + CELL_W / 2:g}" y="{y0 + CELL_H / 2 + 4:g}"'
                f' text-anchor="middle" font-family="sans-serif"'
                f' font-size="11">{label}</text>')
    for xi, xv in enumerate(x_vals):
        parts.append(
            f'<text x="{MARGIN_LEFT + xi * CELL_W + CELL_W / 2:g}"'
            f' y="{MARGIN_TOP + CELL_H * len(y_vals) + 18}"'
            f' text-anchor="middle" font-family="sans-serif"'
            f' font-size="12">{_num(xv)}</text>')
    for yi, yv in enumerate(y_vals):
        y0 = MARGIN_TOP + (len(y_vals) - 1 - yi) * CELL_H
        parts.append(
            f'<text x="{MARGIN_LEFT - 8}" y="{y0 + CELL_H / 2 + 4:g}"'
            f' text-anchor="end" font-family="sans-serif"'
            f' font-size="12">{_num(yv)}</text>')
    parts.append(
        f'<text x="{MARGIN_LEFT + CELL_W * len(x_vals) / 2:g}"'
        f' y="{height - 12}" text-anchor="middle" font-family="sans-serif"'
        f' font-size="13">{spec.x}</text>')
    parts.append(
        f'<text x="20" y="{MARGIN_TOP + CELL_H * len(y_vals) / 2:g}"'
        f' text-anchor="middle" font-family="sans-serif" font-size="13"'
        f' transform="rotate(-90 20 {MARGIN_TOP + CELL_H * len(y_vals) / 2:g})"'
        f'>{spec.y}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def emit_trajectory(prices, P_f: float, title: str = "price trajectory") -> str:
    """Polyline SVG of a price series with the fundamental band marked."""
    prices = np.asarray(prices, dtype=np.float64)
    prices = prices[np.isfinite(prices)]
    if prices.size == 0:
        prices = np.array([P_f])
    width, height = 720, 360
    pad = 50
    lo = min(float(prices.min()), 0.5 * P_f)
    hi = max(float(prices.max()), 1.5 * P_f)
    if hi <= lo:
        hi = lo + 1.0

    def sx(i):
        return pad + (width - 2 * pad) * (i / max(prices.size - 1, 1))

    def sy(p):
        return height - pad - (height - 2 * pad) * ((p - lo) / (hi - lo))

    band_top = sy(1.5 * P_f)
    band_bot = sy(0.5 * P_f)
    points = " ".join(f"{sx(i):.2f},{sy(p):.2f}" for i, p in enumerate(prices))
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}"'
        f' height="{height}" viewBox="0 0 {width} {height}">\n'
        f'<rect x="{pad}" y="{band_top:.2f}" width="{width - 2 * pad}"'
        f' height="{band_bot - band_top:.2f}" fill="#fdecec"/>\n'
        f'<line x1="{pad}" y1="{sy(P_f):.2f}" x2="{width - pad}"'
        f' y2="{sy(P_f):.2f}" stroke="#c33" stroke-dasharray="4 3"/>\n'
        f'<polyline fill="none" stroke="#226" stroke-width="1.2"'
        f' points="{points}"/>\n'
        f'<text x="{width / 2}" y="24" text-anchor="middle"'
        f' font-family="sans-serif" font-size="14">{title}</text>\n'
        "</svg>\n"
    )


def emit_landscape(poly, samples=None, title: str = "free-profit landscape") -> str:
    """SVG of a fitted quartic landscape over o in [-1, 1]."""
    from .glmodel import evaluate

    o = np.linspace(-1.0, 1.0, 201)
    f = evaluate(poly, o)
    width, height = 480, 320
    pad = 40
    lo, hi = float(np.min(f)), float(np.max(f))
    if hi <= lo:
        hi = lo + 1.0

    def sx(v):
        return pad + (width - 2 * pad) * (v + 1.0) / 2.0

    def sy(v):
        return height - pad - (height - 2 * pad) * ((v - lo) / (hi - lo))

    points = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in zip(o, f))
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}"'
        f' height="{height}" viewBox="0 0 {width} {height}">\n'
        f'<polyline fill="none" stroke="#262" stroke-width="1.5"'
        f' points="{points}"/>\n'
        f'<text x="{width / 2}" y="20" text-anchor="middle"'
        f' font-family="sans-serif" font-size="13">{title}</text>\n'
        "</svg>\n"
    )
