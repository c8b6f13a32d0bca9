import logging
from dataclasses import dataclass

import numpy as np
from django.conf import settings

from market.exceptions import DomainError
from market.utility import basic_utility, info_gain, info_gain_derivative

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class UniquenessCertificate:
    kappa: float
    lhs_max: float
    holds: bool
    grid_resolution: float

    @property
    def bound(self):
        return np.inf if self.kappa <= 0 else 1.0 / self.kappa


def simplex_grid(resolution, epsilon=None):
    """
    Flattened (eta_l, eta_a) points of a uniform grid over the share simplex.

    eta_a is floored at epsilon so derivative terms stay finite.
    """
    if not 0 < resolution <= 0.1:
        raise DomainError(f'grid resolution must lie in (0, 0.1], got {resolution}')
    epsilon = settings.TVWS['EPSILON'] if epsilon is None else epsilon
    steps = int(round(1.0 / resolution))
    axis = np.linspace(0.0, 1.0, steps + 1)
    index_l, index_a = np.meshgrid(np.arange(steps + 1), np.arange(steps + 1), indexing='ij')
    inside = index_l + index_a <= steps
    eta_l = axis[index_l[inside]]
    eta_a = np.maximum(axis[index_a[inside]], epsilon)
    return eta_l, eta_a


def uniqueness_certificate(prices, params, grid_resolution=1e-3):
    """
    Grid evaluation of the sufficient condition for a unique, globally
    attracting market equilibrium. A grid maximum under-estimates the true
    one, so `holds` is advisory.
    """
    eta_l, eta_a = simplex_grid(grid_resolution)
    r_basic = basic_utility(eta_l, params)
    gain = info_gain(eta_a, params)
    slope = info_gain_derivative(eta_a, params)
    leasing_margin = params.q_leasing - r_basic
    advanced_margin = params.q_leasing - (r_basic + gain)

    tol = settings.TVWS['COMPARISON_TOL']
    if np.any(advanced_margin <= tol):
        logger.warning('leasing utility does not dominate R_A on the grid; certificate fails')
        return UniquenessCertificate(np.inf, np.inf, False, grid_resolution)

    kappa = float(np.max(np.maximum(
        np.maximum((prices.p_l - prices.p_a) / advanced_margin, 0.0),
        prices.p_a / gain,
    )))
    lhs_max = float(np.max(slope / gain * leasing_margin / advanced_margin))
    bound = np.inf if kappa <= 0 else 1.0 / kappa
    holds = bool(lhs_max <= bound + tol)
    logger.debug('certificate kappa=%.6g lhs_max=%.6g holds=%s', kappa, lhs_max, holds)
    return UniquenessCertificate(kappa, lhs_max, holds, grid_resolution)
