"""Exception types shared across the package."""


class DollarGameError(Exception):
    """Base class for all package-specific errors."""


class ConfigError(DollarGameError):
    """Invalid configuration file or parameter value."""


class RunawayPriceError(DollarGameError):
    """The log-price overflowed and the price is no longer a positive finite
    number.  Carries the step at which the overflow happened and the last
    step record so callers can report a diagnostic instead of clamping."""

    def __init__(self, step, log_price, record=None):
        super().__init__(
            f"price became non-finite at step {step} (log-price {log_price!r})"
        )
        self.step = step
        self.log_price = log_price
        self.record = record


class DegeneratePolynomialError(DollarGameError):
    """Quartic coefficient is zero; the stationary-point equation degenerates."""


class UnderdeterminedFitError(DollarGameError):
    """Not enough occupied histogram bins to fit the landscape polynomial."""


class FitError(DollarGameError):
    """Nonlinear fit failed or is not identifiable from the data given."""
