"""Simulator and analysis toolkit for the $-Game agent-based market model."""

from .config import SimulationConfig, SweepGrid, load_document, parse_config
from .engine import (
    HistoryWindow,
    MarketState,
    RunResult,
    StepRecord,
    TechnicalAgent,
    best_strategy_index,
    encode_history,
    fundamental_probability,
    fundamental_signal,
    generate_strategy,
    init_game,
    order_parameter,
    run_realization,
    step,
    total_profit,
)
from .ensemble import (
    EnsembleSummary,
    RunSummary,
    estimate_crossover,
    run_ensemble,
    sweep,
)
from .glmodel import (
    GLPolynomial,
    evaluate,
    exponent_fit,
    fit_landscape,
    order_parameter_curve,
    stationary_points,
)
from .phase import PhaseLabel, classify_run, classify_step, temperature

__version__ = "0.1.0"
