"""Compiled hot loop for the $-Game step recurrence.

The kernel advances up to a block of steps at a time; the caller supplies
the block's uniform draws (shape ``(n, 2N+1)``: N tie-break doubles, N
override doubles, one coin double per step) so the random stream is owned
by numpy on the Python side.  State that survives across blocks lives in
two small arrays indexed by the ``SI_*`` / ``SF_*`` constants below.
"""

import math

import numpy as np
from numba import njit

# int64 state slots
SI_H = 0              # encoded history window
SI_T = 1              # steps completed so far
SI_RUN_SIGN = 2       # sign of the current same-direction run (0 if none)
SI_RUN_LEN = 3        # length of the current same-direction run
SI_TRIGGER = 4        # step of the first m-long run, -1 if none
SI_BAND_VIOLATED = 5  # price left [0.5, 1.5] * P_f after burn-in
SI_ABORTED = 6        # price overflowed
SI_ABORT_STEP = 7
SI_IMBALANCE_PREV = 8
SI_N_FUND = 9         # total fundamental plays
SI_O_COUNT = 10       # post-burn-in steps counted into the o averages
NSTATE_I = 11

# float64 state slots
SF_LOG_PRICE = 0
SF_SUM_ABS_O = 1
SF_SUM_O = 2
NSTATE_F = 3


@njit(cache=True)
def advance(tables, scores, prev_actions, state_i, state_f, u, n_steps,
            lam, d, p_fund, fundamental, early_stop, burn_in, m,
            out_prices, out_log_prices, out_imbalances, out_bits):
    """Run up to ``n_steps`` steps; returns the number actually executed.

    Stops early when the speculative trigger fires (with ``early_stop``) or
    when the price overflows; the flags in ``state_i`` tell the caller why.
    """
    N, s = scores.shape
    n_hist_mask = (1 << m) - 1
    h = state_i[SI_H]
    t = state_i[SI_T]
    run_sign = state_i[SI_RUN_SIGN]
    run_len = state_i[SI_RUN_LEN]
    log_price = state_f[SF_LOG_PRICE]

    done = 0
    for k in range(n_steps):
        price = math.exp(log_price)
        p_override = 0.0
        if fundamental:
            gamma = abs(price - p_fund) / d
            p_override = gamma * math.exp(-gamma)

        A = 0
        n_fund = 0
        for i in range(N):
            best = scores[i, 0]
            n_tied = 1
            for j in range(1, s):
                sc = scores[i, j]
                if sc > best:
                    best = sc
                    n_tied = 1
                elif sc == best:
                    n_tied += 1
            pick = int(u[k, i] * n_tied)
            if pick >= n_tied:
                pick = n_tied - 1
            j_star = 0
            seen = 0
            for j in range(s):
                if scores[i, j] == best:
                    if seen == pick:
                        j_star = j
                        break
                    seen += 1
            a = tables[i, j_star, h]
            if u[k, N + i] < p_override:
                if price > p_fund:
                    a = -1
                    n_fund += 1
                elif price < p_fund:
                    a = 1
                    n_fund += 1
            A += a

        r = A / lam
        log_price += r
        price_new = math.exp(log_price)

        if A > 0:
            bit = 1
        elif A < 0:
            bit = 0
        else:
            bit = 1 if u[k, 2 * N] < 0.5 else 0

        for i in range(N):
            for j in range(s):
                scores[i, j] += prev_actions[i, j] * A
                prev_actions[i, j] = tables[i, j, h]
        h = ((h << 1) | bit) & n_hist_mask

        t += 1
        done += 1
        out_prices[k] = price_new
        out_log_prices[k] = log_price
        out_imbalances[k] = A
        out_bits[k] = bit
        state_i[SI_N_FUND] += n_fund

        if A == 0:
            run_sign = 0
            run_len = 0
        else:
            sign = 1 if A > 0 else -1
            run_len = run_len + 1 if sign == run_sign else 1
            run_sign = sign
        if run_len >= m and state_i[SI_TRIGGER] < 0:
            state_i[SI_TRIGGER] = t
        if t > burn_in:
            o = A / N
            state_f[SF_SUM_ABS_O] += abs(o)
            state_f[SF_SUM_O] += o
            state_i[SI_O_COUNT] += 1
            if price_new < 0.5 * p_fund or price_new > 1.5 * p_fund:
                state_i[SI_BAND_VIOLATED] = 1

        if not (price_new > 0.0 and math.isfinite(price_new)):
            state_i[SI_ABORTED] = 1
            state_i[SI_ABORT_STEP] = t
            break
        if early_stop and state_i[SI_TRIGGER] >= 0:
            break

    state_i[SI_H] = h
    state_i[SI_T] = t
    state_i[SI_RUN_SIGN] = run_sign
    state_i[SI_RUN_LEN] = run_len
    state_i[SI_IMBALANCE_PREV] = out_imbalances[done - 1] if done > 0 else \
        state_i[SI_IMBALANCE_PREV]
    state_f[SF_LOG_PRICE] = log_price
    return done
