import logging
from dataclasses import dataclass

import numpy as np
from django.conf import settings

from market.exceptions import DomainError

from .payoffs import database_payoff, licensee_payoff

logger = logging.getLogger(__name__)

# Finite-difference second derivatives carry noise of order eps / h**2.
SLACK = 1e-4


def _interior_grid(resolution, margin):
    if not 0 < resolution <= 0.1:
        raise DomainError(f'grid resolution must lie in (0, 0.1], got {resolution}')
    axis = np.arange(margin, 1.0 - margin + 1e-12, resolution)
    eta_l, eta_a = np.meshgrid(axis, axis, indexing='ij')
    inside = eta_l + eta_a <= 1.0 - margin + 1e-12
    return eta_l[inside], eta_a[inside]


def _second_derivatives(payoff, eta_l, eta_a, step):
    centre = payoff(eta_l, eta_a)
    d_ll = (payoff(eta_l + step, eta_a) - 2 * centre + payoff(eta_l - step, eta_a)) / step ** 2
    d_aa = (payoff(eta_l, eta_a + step) - 2 * centre + payoff(eta_l, eta_a - step)) / step ** 2
    d_la = (
        payoff(eta_l + step, eta_a + step) - payoff(eta_l + step, eta_a - step)
        - payoff(eta_l - step, eta_a + step) + payoff(eta_l - step, eta_a - step)
    ) / (4 * step ** 2)
    return d_ll, d_aa, d_la


@dataclass(frozen=True)
class CurvatureReport:
    holds: bool
    licensee_margin: float
    database_margin: float
    points: int

    def __bool__(self):
        return self.holds


def _payoffs(scheme, params):
    return (
        lambda eta_l, eta_a: licensee_payoff(eta_l, eta_a, scheme, params),
        lambda eta_l, eta_a: database_payoff(eta_l, eta_a, scheme, params),
    )


def dominant_diagonal_check(scheme, params, grid_resolution=None, step=None):
    """
    Each firm's own second derivative dominates its cross partial at every
    interior grid point: -U_sl,ll >= |U_sl,la| and -U_db,aa >= |U_db,al|.
    """
    grid_resolution = settings.TVWS['DIAGONAL_RESOLUTION'] if grid_resolution is None else grid_resolution
    step = settings.TVWS['FD_STEP'] if step is None else step
    eta_l, eta_a = _interior_grid(grid_resolution, max(grid_resolution, 2 * step))
    licensee, database = _payoffs(scheme, params)

    sl_ll, _, sl_la = _second_derivatives(licensee, eta_l, eta_a, step)
    _, db_aa, db_la = _second_derivatives(database, eta_l, eta_a, step)
    licensee_margin = float(np.min(-sl_ll - np.abs(sl_la)))
    database_margin = float(np.min(-db_aa - np.abs(db_la)))
    holds = licensee_margin >= -SLACK and database_margin >= -SLACK
    if not holds:
        logger.info('dominant diagonal fails for %s (margins %.3g, %.3g)',
                    scheme, licensee_margin, database_margin)
    return CurvatureReport(holds, licensee_margin, database_margin, int(eta_l.size))


def supermodularity_check(scheme, params, grid_resolution=None, step=None):
    """Mixed partials in (-eta_l, eta_a) are non-negative for both firms."""
    grid_resolution = settings.TVWS['DIAGONAL_RESOLUTION'] if grid_resolution is None else grid_resolution
    step = settings.TVWS['FD_STEP'] if step is None else step
    eta_l, eta_a = _interior_grid(grid_resolution, max(grid_resolution, 2 * step))
    licensee, database = _payoffs(scheme, params)

    licensee_margin = float(np.min(-_second_derivatives(licensee, eta_l, eta_a, step)[2]))
    database_margin = float(np.min(-_second_derivatives(database, eta_l, eta_a, step)[2]))
    holds = licensee_margin >= -SLACK and database_margin >= -SLACK
    return CurvatureReport(holds, licensee_margin, database_margin, int(eta_l.size))
