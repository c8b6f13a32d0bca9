import logging
from dataclasses import dataclass

from django.conf import settings

from market.search import grid_maximize
from market.utility import info_gain, info_gain_derivative

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Disagreement:
    """Payoffs when bargaining fails, with the pure information market behind them."""
    u_licensee: float
    u_database: float
    eta_a: float
    p_a: float

    def as_tuple(self):
        return (self.u_licensee, self.u_database)


def disagreement_point(params, cost_adjusted=None, points=None):
    """
    Without leasing the database sells information alone. With no lessees,
    an advanced share eta_a is sustained by p_a = (1 - eta_a) * g(eta_a), so
    the optimal price is found by searching over eta_a.
    """
    if cost_adjusted is None:
        cost_adjusted = settings.TVWS['DISAGREEMENT_COST_ADJUSTED']
    points = settings.TVWS['BEST_RESPONSE_POINTS'] if points is None else points
    cost = params.cost_advanced if cost_adjusted else 0.0

    def profit(eta_a):
        return ((1.0 - eta_a) * info_gain(eta_a, params) - cost) * eta_a

    def marginal(eta_a):
        eta_a = max(eta_a, settings.TVWS['EPSILON'])
        return float(
            (1.0 - 2.0 * eta_a) * info_gain(eta_a, params)
            + (1.0 - eta_a) * eta_a * info_gain_derivative(eta_a, params)
            - cost
        )

    result = grid_maximize(profit, 0.0, 1.0, points, derivative=marginal)
    eta_a = result.x
    p_a = float((1.0 - eta_a) * info_gain(eta_a, params))
    logger.debug('pure information market: eta_a=%.6f p_a=%.6f profit=%.6f', eta_a, p_a, result.value)
    return Disagreement(0.0, float(max(result.value, 0.0)), eta_a, p_a)
