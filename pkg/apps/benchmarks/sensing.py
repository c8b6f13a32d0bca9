"""
Sensing market: users sense channel quality themselves at cost c_s instead
of buying advanced information, gaining the constant g1 over basic service.
The licensee alone sets the leasing price; the database only collects
commissions, so both disagreement payoffs are zero.

For the users this is the integrated market with g held at g1 and the
information price replaced by c_s, so the Stage III solver and the surplus
integral are reused through that substitution.
"""

import logging

from django.conf import settings

from dynamics.equilibrium import solve_equilibrium, thresholds
from dynamics.surplus import consumer_surplus
from market.exceptions import DomainError
from market.params import MarketShare, PriceProfile, RevenueShare, Wholesale, make_scheme, scheme_domain
from market.search import grid_maximize
from market.utility import basic_utility

from .exceptions import SensingOrderError
from .welfare import BenchmarkReport

logger = logging.getLogger(__name__)


def sensing_view(params, sensing):
    """Integrated-market parameters whose information gain is the sensing gain."""
    if params.q_leasing <= params.alpha1 + sensing.g1:
        raise SensingOrderError(
            f'Q_L = {params.q_leasing} must exceed alpha1 + g1 = {params.alpha1 + sensing.g1}'
        )
    if sensing.g1 <= max(params.alpha2, params.beta2):
        logger.warning('sensing gain %.3g does not exceed the information gain range', sensing.g1)
    return params.replace(alpha2=sensing.g1, beta2=sensing.g1)


def sensing_thresholds(shares, p_l, params, sensing):
    """(theta_lb, theta_sb, theta_ls) at a (eta_l, eta_s) point."""
    t = thresholds(shares, PriceProfile(p_l, sensing.c_s), sensing_view(params, sensing))
    return t.theta_lb, t.theta_ab, t.theta_la


def sensing_stage3(p_l, params, sensing, tol=None):
    """Equilibrium (eta_l, eta_s) for a leasing price."""
    return solve_equilibrium(PriceProfile(p_l, sensing.c_s), sensing_view(params, sensing), tol).shares


def sensing_inverse_price(eta_l, params, sensing):
    """Leasing price at which a fraction eta_l of users lease."""
    unlicensed = 1.0 - eta_l
    margin = params.q_leasing - basic_utility(eta_l, params)
    return min(sensing.c_s + unlicensed * (margin - sensing.g1), unlicensed * margin)


def _licensee_share(scheme, params, sensing, points):
    wholesale = scheme.w if isinstance(scheme, Wholesale) else 0.0

    def margin(eta_l):
        return (sensing_inverse_price(eta_l, params, sensing) - params.cost_leasing - wholesale) * eta_l

    return grid_maximize(margin, 0.0, 1.0, points, vectorized=False).x


def _payoffs(eta_l, p_l, scheme, params):
    profit = (p_l - params.cost_leasing) * eta_l
    if isinstance(scheme, RevenueShare):
        return profit * (1.0 - scheme.delta), profit * scheme.delta
    return (p_l - scheme.w - params.cost_leasing) * eta_l, scheme.w * eta_l


def sensing_outcome(scheme, params, sensing, points=None):
    """Stage II and III of the sensing market at a fixed commission."""
    points = settings.TVWS['BEST_RESPONSE_POINTS'] if points is None else points
    view = sensing_view(params, sensing)
    eta_l = _licensee_share(scheme, params, sensing, points)
    p_l = max(sensing_inverse_price(eta_l, params, sensing), 0.0)
    prices = PriceProfile(p_l, sensing.c_s)
    shares = solve_equilibrium(prices, view).shares
    u_licensee, u_database = _payoffs(shares.eta_l, p_l, scheme, params)
    return shares, prices, u_licensee, u_database, consumer_surplus(shares, prices, view)


def sensing_market_equilibrium(params, sensing, scheme, grid_steps=None, points=None):
    """
    Three-stage sensing benchmark. `scheme` is 'rss' or 'wps' to bargain
    over the commission, or a fixed RevenueShare/Wholesale.
    """
    grid_steps = settings.TVWS['BARGAINING_GRID_STEPS'] if grid_steps is None else grid_steps
    if isinstance(scheme, str):
        lower, upper = scheme_domain(scheme, params)

        def product(value):
            _, _, u_licensee, u_database, _ = sensing_outcome(make_scheme(scheme, value), params, sensing, points)
            if u_licensee < 0 or u_database < 0:
                return float('-inf')
            return u_licensee * u_database

        search = grid_maximize(product, lower, upper, grid_steps, vectorized=False, xatol=1e-6)
        scheme = make_scheme(scheme, search.x)
    elif not isinstance(scheme, (RevenueShare, Wholesale)):
        raise DomainError(f'unknown sensing scheme {scheme!r}')

    shares, prices, u_licensee, u_database, surplus = sensing_outcome(scheme, params, sensing, points)
    logger.info('sensing market with %s: eta_l=%.6f eta_s=%.6f', scheme, shares.eta_l, shares.eta_a)
    return BenchmarkReport(
        scheme_name='sensing',
        shares=MarketShare(shares.eta_l, 0.0),
        prices=PriceProfile(prices.p_l, 0.0),
        u_licensee=u_licensee,
        u_database=u_database,
        consumer_surplus=surplus,
        commission=scheme.value,
        energy_cost=shares.eta_a * sensing.c_s,
        details={'eta_s': shares.eta_a, 'c_s': sensing.c_s},
    )
