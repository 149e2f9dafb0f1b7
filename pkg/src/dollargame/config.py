"""Simulation configuration, sweep grids, and the flat key-value config format.

The config file format (schema version 1) is a flat, line-oriented
``key = value`` document.  ``#`` starts a comment, blank lines are ignored.
The five game parameters ``N, m, s, lambda, d`` accept comma-separated
lists; if any of them has more than one value the document describes a
sweep grid instead of a single run.

Recognized keys::

    schema            int, must be 1 (optional, defaults to 1)
    N                 agent count            (int list, required)
    m                 memory length          (int list, required)
    s                 strategies per agent   (int list, required)
    lambda            market liquidity       (float list, required)
    d                 dividend expectation   (float list, required)
    P_f               fundamental price      (float, required)
    max_steps         steps per realization  (int, default 200 * 2^m)
    R                 realizations per cell  (int, default 200)
    fundamental       on/off                 (default on)
    early_stop        on/off                 (default on)
    burn_in           steps ignored by the band test (int, default 2^m)
    trajectory_detail full | summary         (default summary)
    heatmap_x         sweep axis for plots   (default lambda)
    heatmap_y         sweep axis for plots   (default d)
    gl_samples        per_run | per_step     (default per_run)
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass

from .errors import ConfigError

SCHEMA_VERSION = 1

#: Hard cap on the memory length: a strategy table has 2^m entries.
MAX_MEMORY = 20

#: Standard experiment-protocol defaults.
DEFAULT_REALIZATIONS = 200
STEPS_PER_HISTORY = 200  # max_steps defaults to 200 * 2^m

SWEEP_PARAMS = ("N", "m", "s", "lambda", "d")

#: config-file / CSV name -> SimulationConfig attribute
PARAM_ATTRS = {"N": "N", "m": "m", "s": "s", "lambda": "lam", "d": "d", "P_f": "P_f"}


@dataclass
class SimulationConfig:
    """Parameters of one $-Game realization.

    ``max_steps`` and ``burn_in`` may be given as ``None`` and are then
    resolved to their defaults ``200 * 2^m`` and ``2^m``.
    """

    N: int
    m: int
    s: int
    lam: float
    d: float
    P_f: float
    max_steps: int | None = None
    fundamental: bool = True
    early_stop: bool = True
    burn_in: int | None = None
    trajectory_detail: str = "summary"

    def __post_init__(self):
        if self.N < 1:
            raise ConfigError(f"N must be >= 1, got {self.N}")
        if self.m < 1:
            raise ConfigError(f"m must be >= 1, got {self.m}")
        if self.m > MAX_MEMORY:
            raise ConfigError(
                f"m = {self.m} exceeds the table-size cap m <= {MAX_MEMORY}"
            )
        if self.s < 1:
            raise ConfigError(f"s must be >= 1, got {self.s}")
        if not self.lam > 0:
            raise ConfigError(f"lambda must be > 0, got {self.lam}")
        if not self.d > 0:
            raise ConfigError(f"d must be > 0, got {self.d}")
        if not self.P_f > 0:
            raise ConfigError(f"P_f must be > 0, got {self.P_f}")
        if self.max_steps is None:
            self.max_steps = STEPS_PER_HISTORY * (1 << self.m)
        if self.max_steps < 0:
            raise ConfigError(f"max_steps must be >= 0, got {self.max_steps}")
        if self.burn_in is None:
            self.burn_in = 1 << self.m
        if self.burn_in < 0:
            raise ConfigError(f"burn_in must be >= 0, got {self.burn_in}")
        if self.trajectory_detail not in ("full", "summary"):
            raise ConfigError(
                f"trajectory_detail must be 'full' or 'summary',"
                f" got {self.trajectory_detail!r}"
            )

    @property
    def n_histories(self) -> int:
        return 1 << self.m

    def param(self, name: str):
        """Value of a parameter by its config-file name (e.g. ``'lambda'``)."""
        return getattr(self, PARAM_ATTRS[name])


@dataclass
class SweepGrid:
    """Cartesian grid over the five game parameters, R realizations per cell."""

    N_values: list[int]
    m_values: list[int]
    s_values: list[int]
    lam_values: list[float]
    d_values: list[float]
    P_f: float
    R: int = DEFAULT_REALIZATIONS
    master_seed: int = 0
    max_steps: int | None = None
    fundamental: bool = True
    early_stop: bool = True
    burn_in: int | None = None
    trajectory_detail: str = "summary"

    def __post_init__(self):
        for name in ("N_values", "m_values", "s_values", "lam_values", "d_values"):
            if not getattr(self, name):
                raise ConfigError(f"sweep grid has no values for {name}")
        if self.R < 1:
            raise ConfigError(f"R must be >= 1, got {self.R}")

    def cells(self) -> list[SimulationConfig]:
        """Grid cells in the canonical (m, N, s, lambda, d) order."""
        combos = sorted(
            itertools.product(
                self.m_values, self.N_values, self.s_values,
                self.lam_values, self.d_values,
            )
        )
        return [
            SimulationConfig(
                N=N, m=m, s=s, lam=lam, d=d, P_f=self.P_f,
                max_steps=self.max_steps, fundamental=self.fundamental,
                early_stop=self.early_stop, burn_in=self.burn_in,
                trajectory_detail=self.trajectory_detail,
            )
            for m, N, s, lam, d in combos
        ]

    @property
    def n_cells(self) -> int:
        return (
            len(self.N_values) * len(self.m_values) * len(self.s_values)
            * len(self.lam_values) * len(self.d_values)
        )


@dataclass
class ConfigDocument:
    """Everything a parsed config file carries, including run settings that
    are not part of :class:`SimulationConfig` itself."""

    grid: SweepGrid
    R: int
    heatmap_x: str = "lambda"
    heatmap_y: str = "d"
    gl_samples: str = "per_run"

    @property
    def is_single(self) -> bool:
        return self.grid.n_cells == 1

    def single(self) -> SimulationConfig:
        if not self.is_single:
            raise ConfigError("config describes a sweep grid, not a single run")
        return self.grid.cells()[0]


_INT_KEYS = {"schema", "max_steps", "R", "burn_in"}
_FLOAT_KEYS = {"P_f"}
_BOOL_KEYS = {"fundamental", "early_stop"}
_CHOICE_KEYS = {
    "trajectory_detail": ("full", "summary"),
    "heatmap_x": SWEEP_PARAMS,
    "heatmap_y": SWEEP_PARAMS,
    "gl_samples": ("per_run", "per_step"),
}
_KNOWN_KEYS = (
    set(SWEEP_PARAMS) | _INT_KEYS | _FLOAT_KEYS | _BOOL_KEYS | set(_CHOICE_KEYS)
)
_REQUIRED_KEYS = set(SWEEP_PARAMS) | {"P_f"}


def _parse_scalar(key: str, raw: str, lineno: int):
    try:
        if key in _INT_KEYS:
            return int(raw)
        if key in _FLOAT_KEYS:
            return float(raw)
    except ValueError:
        raise ConfigError(f"line {lineno}: {key}: not a number: {raw!r}") from None
    if key in _BOOL_KEYS:
        if raw not in ("on", "off"):
            raise ConfigError(f"line {lineno}: {key} must be 'on' or 'off', got {raw!r}")
        return raw == "on"
    if key in _CHOICE_KEYS:
        if raw not in _CHOICE_KEYS[key]:
            raise ConfigError(
                f"line {lineno}: {key} must be one of"
                f" {', '.join(_CHOICE_KEYS[key])}; got {raw!r}"
            )
        return raw
    raise AssertionError(key)


def _parse_list(key: str, raw: str, lineno: int) -> list:
    is_int = key in ("N", "m", "s")
    out = []
    for item in raw.split(","):
        item = item.strip()
        try:
            out.append(int(item) if is_int else float(item))
        except ValueError:
            raise ConfigError(
                f"line {lineno}: {key}: not a number: {item!r}"
            ) from None
    if len(set(out)) != len(out):
        raise ConfigError(f"line {lineno}: {key}: duplicate values")
    return out


def load_document(source) -> ConfigDocument:
    """Parse a config document from a path or from literal text.

    A string is treated as a filesystem path when a file by that name
    exists (or when it contains no newline and ends in a path-ish way);
    anything else is parsed as the document text itself.
    """
    text = source
    if isinstance(source, os.PathLike):
        text = _read(os.fspath(source))
    elif isinstance(source, str) and "\n" not in source and os.path.exists(source):
        text = _read(source)

    values: dict[str, object] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" in body:
            key, _, raw = body.partition("=")
        elif ":" in body:
            key, _, raw = body.partition(":")
        else:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, raw = key.strip(), raw.strip()
        if key not in _KNOWN_KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        if key in SWEEP_PARAMS:
            values[key] = _parse_list(key, raw, lineno)
        else:
            values[key] = _parse_scalar(key, raw, lineno)

    missing = _REQUIRED_KEYS - values.keys()
    if missing:
        raise ConfigError(f"missing required key(s): {', '.join(sorted(missing))}")
    schema = values.get("schema", SCHEMA_VERSION)
    if schema != SCHEMA_VERSION:
        raise ConfigError(f"unsupported schema version {schema}")

    grid = SweepGrid(
        N_values=values["N"],
        m_values=values["m"],
        s_values=values["s"],
        lam_values=values["lambda"],
        d_values=values["d"],
        P_f=values["P_f"],
        R=values.get("R", DEFAULT_REALIZATIONS),
        max_steps=values.get("max_steps"),
        fundamental=values.get("fundamental", True),
        early_stop=values.get("early_stop", True),
        burn_in=values.get("burn_in"),
        trajectory_detail=values.get("trajectory_detail", "summary"),
    )
    # Validate every cell eagerly so range errors surface at parse time.
    grid.cells()
    return ConfigDocument(
        grid=grid,
        R=grid.R,
        heatmap_x=values.get("heatmap_x", "lambda"),
        heatmap_y=values.get("heatmap_y", "d"),
        gl_samples=values.get("gl_samples", "per_run"),
    )


def parse_config(source):
    """Parse a config document into a :class:`SimulationConfig` (single run)
    or a :class:`SweepGrid` (any parameter given as a list of values)."""
    doc = load_document(source)
    return doc.single() if doc.is_single else doc.grid


def _read(path: str) -> str:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
