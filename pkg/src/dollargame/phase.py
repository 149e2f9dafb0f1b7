"""Temperature ratio and speculative/fundamental classification of runs."""

from __future__ import annotations

import enum
from typing import Sequence


class PhaseLabel(enum.Enum):
    SPECULATIVE = "speculative"
    FUNDAMENTAL = "fundamental"
    UNDETERMINED = "undetermined"
    ABORTED = "aborted"

    def __str__(self) -> str:
        return self.value


def temperature(m: int, N: int, s: int, include_fundamental: bool = True) -> float:
    """Fluctuation ratio T = (2^m + 1) / (N * s).

    ``include_fundamental=False`` drops the +1 accounting for the
    fundamental strategy and gives the pure technical-pool variant
    2^m / (N * s), kept for comparison.
    """
    if m < 1 or N < 1 or s < 1:
        raise ValueError("m, N and s must all be >= 1")
    pool = (1 << m) + (1 if include_fundamental else 0)
    return pool / (N * s)


def classify_step(prices: Sequence[float], m: int) -> bool:
    """True iff the last m price changes form a strict same-direction run."""
    if len(prices) < m + 1:
        raise ValueError(f"need at least {m + 1} prices, got {len(prices)}")
    tail = prices[-(m + 1):]
    changes = [b - a for a, b in zip(tail, tail[1:])]
    return all(c > 0 for c in changes) or all(c < 0 for c in changes)


def classify_run(prices: Sequence[float], m: int, P_f: float,
                 burn_in: int) -> PhaseLabel:
    """Label a completed (or early-stopped) price trajectory.

    ``prices[t]`` is the price after step t, with ``prices[0]`` the initial
    price.  Speculative if any m successive changes share a strict sign;
    otherwise fundamental if every post-burn-in price stays within
    [0.5, 1.5] * P_f; otherwise undetermined.  Zero changes break a run.
    """
    if len(prices) < 2:
        return PhaseLabel.UNDETERMINED

    run_sign = 0
    run_len = 0
    for t in range(1, len(prices)):
        change = prices[t] - prices[t - 1]
        if change == 0:
            run_sign, run_len = 0, 0
        else:
            sign = 1 if change > 0 else -1
            run_len = run_len + 1 if sign == run_sign else 1
            run_sign = sign
        if run_len >= m:
            return PhaseLabel.SPECULATIVE

    for t in range(burn_in + 1, len(prices)):
        if prices[t] < 0.5 * P_f or prices[t] > 1.5 * P_f:
            return PhaseLabel.UNDETERMINED
    return PhaseLabel.FUNDAMENTAL
