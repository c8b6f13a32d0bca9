from market.exceptions import MarketError


class NoSignChangeError(MarketError):
    """A bracketing residual has the same sign at both ends."""

    def __init__(self, message, lower=None, upper=None):
        self.lower = lower
        self.upper = upper
        super().__init__(message)


class ConvergenceError(MarketError):
    """An iteration ran out of rounds; carries the last iterate."""

    def __init__(self, message, last=None, rounds=None, oscillating=False):
        self.last = last
        self.rounds = rounds
        self.oscillating = oscillating
        super().__init__(message)


class ThresholdOrderError(MarketError):
    """User-type thresholds contradict the claimed equilibrium branch."""
