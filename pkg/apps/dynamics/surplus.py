import numpy as np
from django.conf import settings

from market.utility import service_utilities

from .equilibrium import thresholds
from .exceptions import ThresholdOrderError


def consumer_surplus(shares, prices, params):
    """Integral of the best-response user payoff over theta ~ U[0, 1] at an equilibrium."""
    tol = 1e-9
    utilities = service_utilities(shares, params)
    t = thresholds(shares, prices, params)
    q_leasing = params.q_leasing

    if shares.eta_a > settings.TVWS['COMPARISON_TOL']:
        upper = min(t.theta_la, 1.0)
        if t.theta_ab < -tol or t.theta_ab > upper + tol:
            raise ThresholdOrderError(
                f'advanced users present but theta_ab={t.theta_ab:.6g} not in [0, {upper:.6g}]'
            )
        low = min(max(t.theta_ab, 0.0), upper)
        return float(
            utilities.r_basic * low ** 2 / 2
            + utilities.r_advanced * (upper ** 2 - low ** 2) / 2 - prices.p_a * (upper - low)
            + q_leasing * (1 - upper ** 2) / 2 - prices.p_l * (1 - upper)
        )

    breakpoint = min(max(t.theta_lb, 0.0), 1.0)
    if t.theta_ab < breakpoint - tol:
        raise ThresholdOrderError(
            f'no advanced users but theta_ab={t.theta_ab:.6g} < theta_lb={breakpoint:.6g}'
        )
    return float(
        utilities.r_basic * breakpoint ** 2 / 2
        + q_leasing * (1 - breakpoint ** 2) / 2 - prices.p_l * (1 - breakpoint)
    )


def sampled_surplus(shares, prices, params, samples=None, seed=None):
    """Monte Carlo mean and standard error of the best user payoff."""
    samples = settings.TVWS['MC_SAMPLES'] if samples is None else samples
    rng = np.random.default_rng(settings.TVWS['SEED'] if seed is None else seed)
    utilities = service_utilities(shares, params)
    theta = rng.uniform(size=samples)
    payoffs = np.maximum.reduce([
        theta * utilities.r_basic,
        theta * utilities.r_advanced - prices.p_a,
        theta * params.q_leasing - prices.p_l,
    ])
    return float(payoffs.mean()), float(payoffs.std(ddof=1) / np.sqrt(samples))
