"""
Share-space view of the price competition.

Each feasible market-share point corresponds to exactly one price pair, so
the firms can be treated as choosing shares; prices are recovered from the
inverse map below.
"""

import logging
from dataclasses import dataclass

import numpy as np
from django.conf import settings

from market.params import PriceProfile, RevenueShare, Wholesale
from market.utility import basic_utility, congestion_derivative, info_gain, info_gain_derivative

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FirmPayoffs:
    u_licensee: float
    u_database: float

    @property
    def network_profit(self):
        return self.u_licensee + self.u_database


def inverse_prices(eta_l, eta_a, params):
    """(p_l, p_a) sustaining the shares; accepts arrays."""
    eta_l = np.asarray(eta_l, dtype=float)
    gain = info_gain(eta_a, params)
    p_a = (1.0 - eta_l - eta_a) * gain
    p_l = (1.0 - eta_l) * (params.q_leasing - basic_utility(eta_l, params)) - eta_a * gain
    return p_l, p_a


def shares_to_prices(shares, params):
    """Prices sustaining the shares, floored at zero."""
    p_l, p_a = inverse_prices(shares.eta_l, shares.eta_a, params)
    if p_l < 0.0 or p_a < 0.0:
        logger.warning('shares (%.6g, %.6g) need negative prices (%.6g, %.6g); clamping to zero',
                       shares.eta_l, shares.eta_a, p_l, p_a)
    return PriceProfile(max(float(p_l), 0.0), max(float(p_a), 0.0))


def licensee_payoff(eta_l, eta_a, scheme, params):
    p_l, _ = inverse_prices(eta_l, eta_a, params)
    margin = (p_l - params.cost_leasing) * eta_l
    if isinstance(scheme, RevenueShare):
        return margin * (1.0 - scheme.delta)
    return margin - scheme.w * eta_l


def database_payoff(eta_l, eta_a, scheme, params):
    p_l, p_a = inverse_prices(eta_l, eta_a, params)
    information = (p_a - params.cost_advanced) * eta_a
    if isinstance(scheme, RevenueShare):
        return information + scheme.delta * (p_l - params.cost_leasing) * eta_l
    return information + scheme.w * eta_l


def firm_payoffs(shares, scheme, params):
    return FirmPayoffs(
        float(licensee_payoff(shares.eta_l, shares.eta_a, scheme, params)),
        float(database_payoff(shares.eta_l, shares.eta_a, scheme, params)),
    )


def licensee_objective(eta_l, eta_a, scheme, params):
    """
    What the licensee maximizes over its own share. The revenue-share factor
    (1 - delta) is left out; it scales but does not move the maximizer.
    """
    p_l, _ = inverse_prices(eta_l, eta_a, params)
    wholesale = scheme.w if isinstance(scheme, Wholesale) else 0.0
    return (p_l - params.cost_leasing - wholesale) * eta_l


def licensee_foc(eta_l, eta_a, scheme, params):
    """Derivative of `licensee_objective` in eta_l."""
    wholesale = scheme.w if isinstance(scheme, Wholesale) else 0.0
    unlicensed = 1.0 - eta_l
    with np.errstate(invalid='ignore', divide='ignore'):
        congestion_term = eta_l * unlicensed * congestion_derivative(unlicensed, params)
    congestion_term = np.where(eta_l * unlicensed == 0.0, 0.0, congestion_term)
    return (
        (1.0 - 2.0 * eta_l) * (params.q_leasing - basic_utility(eta_l, params))
        + congestion_term
        - eta_a * info_gain(eta_a, params)
        - params.cost_leasing - wholesale
    )


def database_foc(eta_a, eta_l, scheme, params):
    """Derivative of the database payoff in eta_a, floored at EPSILON."""
    eta_a = np.maximum(eta_a, settings.TVWS['EPSILON'])
    gain = info_gain(eta_a, params)
    slope = info_gain_derivative(eta_a, params)
    residual = (1.0 - eta_l - eta_a) * (gain + eta_a * slope) - eta_a * gain - params.cost_advanced
    if isinstance(scheme, RevenueShare):
        residual = residual - scheme.delta * eta_l * (gain + eta_a * slope)
    return residual
