"""Core $-Game dynamics: strategies, agents, one time step, one realization.

Two execution paths implement the exact same dynamics:

* an object-level path (:class:`TechnicalAgent`, :func:`step`) written for
  clarity, used as the reference in equivalence tests, and
* a compiled array kernel (:mod:`dollargame._kernel`) used by
  :func:`run_realization` for ensemble-scale throughput.

Both paths consume the same random stream in the same documented order, so
a (config, seed) pair produces bit-identical trajectories on either path.

Random draw contract (numpy ``Generator``, uniform doubles unless noted):

* initialization: ``N * s * 2^m`` doubles for the strategy tables, in
  (agent, strategy, history) order, entry ``+1`` iff ``u < 0.5``; then ``m``
  doubles for the initial history window (bit ``1`` iff ``u < 0.5``,
  chronological order, most recent last);
* every step, consumed whether used or not: ``N`` doubles for strategy
  tie-breaking, ``N`` doubles for the fundamental-override test, and one
  double for the direction-bit coin used when the imbalance is zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernel
from .config import MAX_MEMORY, SimulationConfig
from .errors import RunawayPriceError
from .phase import PhaseLabel


def _exp(x: float) -> float:
    """math.exp with C overflow semantics (inf instead of OverflowError)."""
    try:
        return math.exp(x)
    except OverflowError:
        return math.inf


def generate_strategy(rng: np.random.Generator, m: int) -> np.ndarray:
    """Draw a random technical strategy: 2^m independent uniform actions.

    Returns an int8 array of +1/-1 indexed by the encoded history.
    """
    if m < 1 or m > MAX_MEMORY:
        raise ValueError(f"m must be in [1, {MAX_MEMORY}], got {m}")
    u = rng.random(1 << m)
    return np.where(u < 0.5, 1, -1).astype(np.int8)


def encode_history(bits) -> int:
    """Encode direction bits (most recent last) as the history scalar.

    The most recent bit is the least-significant one, so the all-up window
    of length m encodes to 2^m - 1.
    """
    bits = tuple(bits)
    if not bits:
        raise ValueError("history must contain at least one bit")
    if any(b not in (0, 1) for b in bits):
        raise ValueError(f"history bits must be 0 or 1, got {bits}")
    h = 0
    for k, b in enumerate(reversed(bits)):
        h |= b << k
    return h


@dataclass(frozen=True)
class HistoryWindow:
    """The last m price-direction bits, most recent last."""

    bits: tuple[int, ...]

    def __post_init__(self):
        encode_history(self.bits)  # validates

    @classmethod
    def random(cls, rng: np.random.Generator, m: int) -> "HistoryWindow":
        u = rng.random(m)
        return cls(tuple(1 if x < 0.5 else 0 for x in u))

    @property
    def m(self) -> int:
        return len(self.bits)

    @property
    def encoded(self) -> int:
        return encode_history(self.bits)

    def shifted(self, bit: int) -> "HistoryWindow":
        """Window after one price move: drop the oldest bit, append `bit`."""
        return HistoryWindow(self.bits[1:] + (int(bit),))


@dataclass
class TechnicalAgent:
    """An agent holding s strategy tables with cumulative virtual payoffs."""

    id: int
    strategies: list[np.ndarray]
    scores: np.ndarray
    prev_actions: np.ndarray
    played_fundamental_prev: bool = False

    @property
    def s(self) -> int:
        return len(self.strategies)

    @property
    def relative_payoff(self) -> float:
        """Score difference between the two strategies (s = 2 only)."""
        if self.s != 2:
            raise ValueError("relative payoff is defined for s = 2 agents")
        return float(self.scores[0] - self.scores[1])


@dataclass
class MarketState:
    t: int
    price: float
    log_price: float
    window: HistoryWindow
    fundamental_price: float
    dividend: float
    liquidity: float
    imbalance_prev: int = 0


@dataclass
class StepRecord:
    t: int
    actions: list[int]
    imbalance: int
    return_: float
    direction_bit: int
    n_fundamental_plays: int
    price_after: float


@dataclass
class RunResult:
    """Outcome of one realization.

    ``prices`` / ``log_prices`` / ``imbalances`` / ``direction_bits`` cover
    steps 1..stop_step and are kept only with ``trajectory_detail='full'``
    (``prices`` excludes the initial price P(0) = P_f).
    """

    config: SimulationConfig
    seed: object
    label: PhaseLabel
    stop_step: int
    trigger_step: int | None
    aborted_step: int | None
    final_price: float
    final_log_price: float
    mean_abs_o: float
    mean_o: float
    sum_abs_o: float
    sum_o: float
    o_count: int
    n_fundamental_plays: int
    band_violated: bool
    prices: np.ndarray | None = None
    log_prices: np.ndarray | None = None
    imbalances: np.ndarray | None = None
    direction_bits: np.ndarray | None = None


def _select_best(scores, u: float) -> int:
    """Index of the maximal score; ties broken uniformly via one double."""
    best = max(scores)
    tied = [j for j, sc in enumerate(scores) if sc == best]
    k = min(int(u * len(tied)), len(tied) - 1)
    return tied[k]


def best_strategy_index(agent: TechnicalAgent, rng: np.random.Generator) -> int:
    """Best strategy per cumulative payoff, random uniform tie-breaking."""
    return _select_best(agent.scores, rng.random())


def fundamental_signal(price: float, fundamental_price: float) -> int:
    """-1 (sell) above the fundamental price, +1 (buy) below, 0 at parity."""
    if price > fundamental_price:
        return -1
    if price < fundamental_price:
        return 1
    return 0


def fundamental_probability(price: float, fundamental_price: float,
                            dividend: float) -> float:
    """Probability of playing the fundamental strategy: gamma * exp(-gamma)
    with gamma = |price - fundamental_price| / dividend."""
    gamma = abs(price - fundamental_price) / dividend
    if math.isinf(gamma):
        return 0.0
    return gamma * math.exp(-gamma)


def total_profit(imbalance_prev: int, imbalance_cur: int) -> float:
    """Aggregate payoff of all played actions: A(t-1) * A(t)."""
    return imbalance_prev * imbalance_cur


def order_parameter(imbalance: int, N: int) -> float:
    """Imbalance per agent, in [-1, 1]."""
    return imbalance / N


def init_game(config: SimulationConfig,
              rng: np.random.Generator) -> tuple[MarketState, list[TechnicalAgent]]:
    """Fresh agents and market state, consuming the documented init draws."""
    agents = []
    for i in range(config.N):
        strategies = [generate_strategy(rng, config.m) for _ in range(config.s)]
        agents.append(TechnicalAgent(
            id=i,
            strategies=strategies,
            scores=np.zeros(config.s, dtype=np.float64),
            prev_actions=np.zeros(config.s, dtype=np.int8),
        ))
    window = HistoryWindow.random(rng, config.m)
    h0 = window.encoded
    for agent in agents:
        agent.prev_actions = np.array(
            [int(table[h0]) for table in agent.strategies], dtype=np.int8)
    state = MarketState(
        t=0,
        price=config.P_f,
        log_price=math.log(config.P_f),
        window=window,
        fundamental_price=config.P_f,
        dividend=config.d,
        liquidity=config.lam,
    )
    return state, agents


def step(state: MarketState, agents: list[TechnicalAgent],
         rng: np.random.Generator, fundamental: bool = True) -> StepRecord:
    """Advance the game by one period, mutating state and agents.

    Raises :class:`RunawayPriceError` (with the completed record attached)
    when the price update overflows to a non-positive or non-finite value.
    """
    N = len(agents)
    tie_u = rng.random(N)
    fund_u = rng.random(N)
    coin_u = rng.random(1)[0]

    h = state.window.encoded
    price = state.price
    p_override = 0.0
    if fundamental:
        p_override = fundamental_probability(
            price, state.fundamental_price, state.dividend)
    signal = fundamental_signal(price, state.fundamental_price)

    played = []
    n_fund = 0
    for i, agent in enumerate(agents):
        j = _select_best(agent.scores, tie_u[i])
        a = int(agent.strategies[j][h])
        if fund_u[i] < p_override and signal != 0:
            a = signal
            n_fund += 1
            agent.played_fundamental_prev = True
        else:
            agent.played_fundamental_prev = False
        played.append(a)

    A = sum(played)
    r = A / state.liquidity
    state.log_price += r
    state.price = _exp(state.log_price)

    if A > 0:
        bit = 1
    elif A < 0:
        bit = 0
    else:
        bit = 1 if coin_u < 0.5 else 0

    # Virtual payoff for every strategy, played or not, before re-evaluating
    # the recommendations at the current (pre-shift) history.
    for agent in agents:
        for j, table in enumerate(agent.strategies):
            agent.scores[j] += float(agent.prev_actions[j]) * A
            agent.prev_actions[j] = int(table[h])

    state.window = state.window.shifted(bit)
    state.imbalance_prev = A
    state.t += 1

    record = StepRecord(
        t=state.t, actions=played, imbalance=A, return_=r,
        direction_bit=bit, n_fundamental_plays=n_fund,
        price_after=state.price,
    )
    if not (state.price > 0.0 and math.isfinite(state.price)):
        raise RunawayPriceError(state.t, state.log_price, record)
    return record


def _label(config, stop_step, triggered, aborted, band_violated) -> PhaseLabel:
    if config.max_steps == 0 or stop_step == 0:
        return PhaseLabel.UNDETERMINED
    if triggered:
        return PhaseLabel.SPECULATIVE
    if aborted:
        return PhaseLabel.ABORTED
    if not band_violated:
        return PhaseLabel.FUNDAMENTAL
    return PhaseLabel.UNDETERMINED


def run_realization(config: SimulationConfig, seed,
                    use_kernel: bool = True) -> RunResult:
    """Run one full realization of the game from a fresh seed.

    ``seed`` is anything :func:`numpy.random.default_rng` accepts.  The
    compiled kernel and the object-level path yield identical results; the
    latter is kept for verification (``use_kernel=False``).
    """
    rng = np.random.default_rng(seed)
    if use_kernel:
        return _run_kernel(config, seed, rng)
    return _run_reference(config, seed, rng)


def _run_kernel(config: SimulationConfig, seed, rng) -> RunResult:
    N, s, m = config.N, config.s, config.m
    n_hist = config.n_histories
    u = rng.random((N, s, n_hist))
    tables = np.where(u < 0.5, 1, -1).astype(np.int8)
    wbits = (rng.random(m) < 0.5).astype(np.int64)
    h0 = encode_history(wbits.tolist())
    prev_actions = tables[:, :, h0].copy()
    scores = np.zeros((N, s), dtype=np.float64)

    state_i = np.zeros(_kernel.NSTATE_I, dtype=np.int64)
    state_f = np.zeros(_kernel.NSTATE_F, dtype=np.float64)
    state_i[_kernel.SI_H] = h0
    state_i[_kernel.SI_TRIGGER] = -1
    state_i[_kernel.SI_ABORT_STEP] = -1
    state_f[_kernel.SF_LOG_PRICE] = math.log(config.P_f)

    keep = config.trajectory_detail == "full"
    prices_parts, logp_parts, imb_parts, bit_parts = [], [], [], []

    block = 4096
    t = 0
    while t < config.max_steps:
        n = min(block, config.max_steps - t)
        u_step = rng.random((n, 2 * N + 1))
        out_prices = np.empty(n, dtype=np.float64)
        out_logp = np.empty(n, dtype=np.float64)
        out_imb = np.empty(n, dtype=np.int64)
        out_bits = np.empty(n, dtype=np.int8)
        done = _kernel.advance(
            tables, scores, prev_actions, state_i, state_f, u_step, n,
            config.lam, config.d, config.P_f,
            config.fundamental, config.early_stop, config.burn_in, m,
            out_prices, out_logp, out_imb, out_bits,
        )
        t += done
        if keep:
            prices_parts.append(out_prices[:done])
            logp_parts.append(out_logp[:done])
            imb_parts.append(out_imb[:done])
            bit_parts.append(out_bits[:done])
        if state_i[_kernel.SI_ABORTED] or (
                config.early_stop and state_i[_kernel.SI_TRIGGER] >= 0):
            break

    trigger = int(state_i[_kernel.SI_TRIGGER])
    abort_step = int(state_i[_kernel.SI_ABORT_STEP])
    aborted = bool(state_i[_kernel.SI_ABORTED])
    band_violated = bool(state_i[_kernel.SI_BAND_VIOLATED])
    o_count = int(state_i[_kernel.SI_O_COUNT])
    log_price = float(state_f[_kernel.SF_LOG_PRICE])

    return RunResult(
        config=config,
        seed=seed,
        label=_label(config, t, trigger >= 0, aborted, band_violated),
        stop_step=t,
        trigger_step=trigger if trigger >= 0 else None,
        aborted_step=abort_step if aborted else None,
        final_price=_exp(log_price),
        final_log_price=log_price,
        mean_abs_o=(state_f[_kernel.SF_SUM_ABS_O] / o_count
                    if o_count else math.nan),
        mean_o=(state_f[_kernel.SF_SUM_O] / o_count if o_count else math.nan),
        sum_abs_o=float(state_f[_kernel.SF_SUM_ABS_O]),
        sum_o=float(state_f[_kernel.SF_SUM_O]),
        o_count=o_count,
        n_fundamental_plays=int(state_i[_kernel.SI_N_FUND]),
        band_violated=band_violated,
        prices=np.concatenate(prices_parts) if keep and prices_parts
        else (np.empty(0) if keep else None),
        log_prices=np.concatenate(logp_parts) if keep and logp_parts
        else (np.empty(0) if keep else None),
        imbalances=np.concatenate(imb_parts) if keep and imb_parts
        else (np.empty(0, dtype=np.int64) if keep else None),
        direction_bits=np.concatenate(bit_parts) if keep and bit_parts
        else (np.empty(0, dtype=np.int8) if keep else None),
    )


def _run_reference(config: SimulationConfig, seed, rng) -> RunResult:
    state, agents = init_game(config, rng)
    prices, log_prices, imbalances, bits = [], [], [], []
    trigger_step = None
    abort_step = None
    band_violated = False
    run_sign = 0
    run_len = 0
    sum_abs_o = 0.0
    sum_o = 0.0
    o_count = 0
    n_fund = 0

    for t in range(1, config.max_steps + 1):
        aborted_now = False
        try:
            rec = step(state, agents, rng, fundamental=config.fundamental)
        except RunawayPriceError as exc:
            rec = exc.record
            abort_step = t
            aborted_now = True

        prices.append(rec.price_after)
        log_prices.append(state.log_price)
        imbalances.append(rec.imbalance)
        bits.append(rec.direction_bit)
        n_fund += rec.n_fundamental_plays

        A = rec.imbalance
        if A == 0:
            run_sign, run_len = 0, 0
        else:
            sign = 1 if A > 0 else -1
            run_len = run_len + 1 if sign == run_sign else 1
            run_sign = sign
        if run_len >= config.m and trigger_step is None:
            trigger_step = t
        if t > config.burn_in:
            o = order_parameter(A, config.N)
            sum_abs_o += abs(o)
            sum_o += o
            o_count += 1
            if (rec.price_after < 0.5 * config.P_f
                    or rec.price_after > 1.5 * config.P_f):
                band_violated = True
        if aborted_now or (config.early_stop and trigger_step is not None):
            break

    stop_step = len(prices)
    keep = config.trajectory_detail == "full"
    return RunResult(
        config=config,
        seed=seed,
        label=_label(config, stop_step, trigger_step is not None,
                     abort_step is not None, band_violated),
        stop_step=stop_step,
        trigger_step=trigger_step,
        aborted_step=abort_step,
        final_price=state.price,
        final_log_price=state.log_price,
        mean_abs_o=sum_abs_o / o_count if o_count else math.nan,
        mean_o=sum_o / o_count if o_count else math.nan,
        sum_abs_o=sum_abs_o,
        sum_o=sum_o,
        o_count=o_count,
        n_fundamental_plays=n_fund,
        band_violated=band_violated,
        prices=np.asarray(prices) if keep else None,
        log_prices=np.asarray(log_prices) if keep else None,
        imbalances=np.asarray(imbalances, dtype=np.int64) if keep else None,
        direction_bits=np.asarray(bits, dtype=np.int8) if keep else None,
    )
