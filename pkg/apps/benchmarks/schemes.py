"""
Reference market structures the bargained schemes are compared against.
"""

import logging

import numpy as np
from django.conf import settings
from scipy.optimize import minimize

from bargaining.disagreement import disagreement_point
from competition.payoffs import inverse_prices, shares_to_prices
from competition.stage2 import solve_stage2
from dynamics.surplus import consumer_surplus
from market.params import MarketShare, PriceProfile, RevenueShare

from .welfare import BenchmarkReport, report_from_stage2

logger = logging.getLogger(__name__)


def _joint_profit(eta_l, eta_a, params):
    p_l, p_a = inverse_prices(eta_l, eta_a, params)
    return (p_a - params.cost_advanced) * eta_a + (p_l - params.cost_leasing) * eta_l


def coordination_optimum(params, grid=None):
    """The database and the licensee set shares jointly to maximize their total profit."""
    grid = settings.TVWS['COORDINATION_GRID'] if grid is None else grid
    axis = np.linspace(0.0, 1.0, grid)
    eta_l, eta_a = np.meshgrid(axis, axis, indexing='ij')
    inside = eta_l + eta_a <= 1.0 + 1e-12
    eta_l, eta_a = eta_l[inside], np.minimum(eta_a[inside], 1.0 - eta_l[inside])
    profits = _joint_profit(eta_l, eta_a, params)
    best = int(np.argmax(profits))
    start = np.array([eta_l[best], eta_a[best]])

    step = axis[1] - axis[0]
    box = [(max(x - step, 0.0), min(x + step, 1.0)) for x in start]

    def negated(point):
        if point[0] < 0 or point[1] < 0 or point[0] + point[1] > 1.0:
            return np.inf
        return -float(_joint_profit(point[0], point[1], params))

    refined = minimize(negated, start, method='Nelder-Mead', bounds=box,
                       options={'xatol': 1e-10, 'fatol': 1e-14})
    point = refined.x if refined.fun <= -profits[best] else start
    shares = MarketShare.clipped(*point)
    prices = shares_to_prices(shares, params)
    logger.info('coordination optimum at (%.6f, %.6f)', shares.eta_l, shares.eta_a)
    return BenchmarkReport(
        scheme_name='coordination',
        shares=shares,
        prices=prices,
        u_licensee=(prices.p_l - params.cost_leasing) * shares.eta_l,
        u_database=(prices.p_a - params.cost_advanced) * shares.eta_a,
        consumer_surplus=consumer_surplus(shares, prices, params),
        energy_cost=shares.eta_a * params.cost_advanced,
    )


def pure_information_market(params):
    """
    The database keeps its licensed information to itself and sells only the
    advanced service; nobody leases. Same computation as the bargaining
    disagreement point.
    """
    disagreement = disagreement_point(params)
    shares = MarketShare(0.0, disagreement.eta_a)
    p_l, _ = inverse_prices(0.0, disagreement.eta_a, params)
    prices = PriceProfile(max(float(p_l), 0.0), disagreement.p_a)
    return BenchmarkReport(
        scheme_name='pure_info',
        shares=shares,
        prices=prices,
        u_licensee=disagreement.u_licensee,
        u_database=disagreement.u_database,
        consumer_surplus=consumer_surplus(shares, prices, params),
        energy_cost=shares.eta_a * params.cost_advanced,
    )


def third_party_scheme(params, **stage2_options):
    """The database shows licensed channels for free: Stage II with no commission."""
    stage2 = solve_stage2(RevenueShare(0.0), params, **stage2_options)
    return report_from_stage2('third_party', stage2, params)
