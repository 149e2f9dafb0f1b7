"""Quartic free-profit landscape utilities.

The landscape over the order parameter o is the quartic
``F(o) = C + a*o + alpha*o^2 + b*o^3 + (beta/2)*o^4``; the symmetric case
(a = b = 0) has stationary points where ``o * (alpha + beta * o^2) = 0``,
giving the disordered root 0 and, for alpha/beta < 0, the ordered pair
``+-sqrt(-alpha/beta)`` with the mean-field square-root temperature scaling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import DegeneratePolynomialError, FitError, UnderdeterminedFitError


@dataclass(frozen=True)
class GLPolynomial:
    C: float = 0.0
    a: float = 0.0
    alpha: float = 0.0
    b: float = 0.0
    beta: float = 0.0

    @property
    def symmetric(self) -> bool:
        return self.a == 0.0 and self.b == 0.0


def evaluate(poly: GLPolynomial, o) -> float | np.ndarray:
    """Value of the quartic at o (scalar or array)."""
    o = np.asarray(o, dtype=np.float64)
    # powers built from o*o keep the symmetric part exactly even in o
    o2 = o * o
    value = (poly.C + poly.alpha * o2 + 0.5 * poly.beta * o2 * o2
             + o * (poly.a + poly.b * o2))
    return float(value) if value.ndim == 0 else value


def stationary_points(alpha: float, beta: float) -> tuple[float, ...]:
    """Real roots of o * (alpha + beta * o^2) = 0, sorted ascending.

    {0} when alpha/beta >= 0, else {-o*, 0, +o*} with o* = sqrt(-alpha/beta).
    """
    if beta == 0.0:
        raise DegeneratePolynomialError("beta = 0: quartic term vanishes")
    ratio = alpha / beta
    if ratio >= 0.0:
        return (0.0,)
    root = math.sqrt(-ratio)
    return (-root, 0.0, root)


def order_parameter_curve(T_values, T_c: float, beta: float) -> np.ndarray:
    """|o*| along a temperature axis: sqrt((T_c - T)/beta) below T_c, else 0."""
    if not beta > 0:
        raise ValueError(f"beta must be > 0, got {beta}")
    T = np.asarray(T_values, dtype=np.float64)
    gap = np.where(T < T_c, T_c - T, 0.0)
    return np.sqrt(gap / beta)


def fit_landscape(samples, bins: int = 32) -> GLPolynomial:
    """Fit the symmetric quartic to the empirical landscape of o samples.

    Histograms the samples on [-1, 1], forms L(o) = -log(density + eps)
    with eps = 1 / (2 * n_samples) regularizing empty bins, and
    least-squares fits C + alpha*o^2 + (beta/2)*o^4 to L over all bins.
    """
    samples = np.asarray(samples, dtype=np.float64)
    if samples.ndim != 1 or samples.size < 100:
        raise ValueError("need at least 100 one-dimensional samples")
    if bins < 8:
        raise ValueError(f"bins must be >= 8, got {bins}")
    counts, edges = np.histogram(samples, bins=bins, range=(-1.0, 1.0))
    if int((counts > 0).sum()) < 3:
        raise UnderdeterminedFitError(
            f"only {(counts > 0).sum()} non-empty bins; need at least 3")
    width = edges[1] - edges[0]
    density = counts / (samples.size * width)
    eps = 1.0 / (2.0 * samples.size)
    landscape = -np.log(density + eps)
    centers = 0.5 * (edges[:-1] + edges[1:])
    design = np.column_stack(
        [np.ones_like(centers), centers ** 2, 0.5 * centers ** 4])
    coef, *_ = np.linalg.lstsq(design, landscape, rcond=None)
    return GLPolynomial(C=float(coef[0]), alpha=float(coef[1]),
                        beta=float(coef[2]))


def _log_power_fit(T: np.ndarray, o: np.ndarray, T_c: float):
    """Closed-form (log A, exponent) and residual for fixed T_c."""
    x = np.log(T_c - T)
    y = np.log(o)
    xm, ym = x.mean(), y.mean()
    dx = x - xm
    denom = float(dx @ dx)
    slope = float(dx @ (y - ym)) / denom
    intercept = ym - slope * xm
    resid = y - (intercept + slope * x)
    return intercept, slope, float(resid @ resid)


def exponent_fit(pairs, T_c_guess: float) -> tuple[float, float]:
    """Fit |o*| = A * (T_c - T)^exponent to (T, |o*|) pairs below T_c.

    Profiles the nonlinear parameter: for each trial T_c the amplitude and
    exponent come from a closed-form log-log regression, and the residual is
    minimized over T_c with a bounded scalar search.  Returns (T_c, exponent).
    """
    pts = [(float(t), float(o)) for t, o in pairs if o > 0]
    if len(pts) < 4:
        raise FitError(f"need at least 4 pairs with |o*| > 0, got {len(pts)}")
    T = np.array([t for t, _ in pts])
    o = np.array([v for _, v in pts])
    if np.unique(T).size < 4:
        raise FitError("need at least 4 distinct temperatures")

    t_max = float(T.max())
    span = max(float(T.max() - T.min()), 1e-6)
    lo = t_max + 1e-12 + 1e-12 * abs(t_max)
    hi = max(float(T_c_guess), t_max) + 10.0 * span

    result = minimize_scalar(
        lambda tc: _log_power_fit(T, o, tc)[2],
        bounds=(lo, hi), method="bounded",
        options={"xatol": 1e-13, "maxiter": 500},
    )
    if not result.success or not math.isfinite(result.x):
        raise FitError(f"temperature search did not converge: {result.message}")
    T_c = float(result.x)
    _, exponent, rss = _log_power_fit(T, o, T_c)
    if not math.isfinite(exponent):
        raise FitError(f"non-finite exponent (rss {rss!r})")
    return T_c, exponent
