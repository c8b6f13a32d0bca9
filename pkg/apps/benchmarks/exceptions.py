from market.exceptions import MarketError


class SensingOrderError(MarketError):
    """Leasing no longer beats sensing: Q_L <= f + g1 somewhere on the simplex."""
