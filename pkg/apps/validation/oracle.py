"""
Brute-force Stage II check: every cell of a share grid is tested for being
a mutual best response, independently of the iterative solver.
"""

import logging

import numpy as np
from scipy import ndimage

from competition.payoffs import database_payoff, licensee_objective
from market.exceptions import DomainError
from market.params import MarketShare, check_scheme

from .exceptions import OracleCandidateError

logger = logging.getLogger(__name__)


def _payoff_grids(scheme, params, resolution):
    steps = int(round(1.0 / resolution))
    axis = np.linspace(0.0, 1.0, steps + 1)
    eta_l, eta_a = np.meshgrid(axis, axis, indexing='ij')
    feasible = eta_l + eta_a <= 1.0 + 1e-12
    with np.errstate(invalid='ignore'):
        licensee = np.where(feasible, licensee_objective(eta_l, eta_a, scheme, params), -np.inf)
        database = np.where(feasible, database_payoff(eta_l, eta_a, scheme, params), -np.inf)
    return axis, feasible, licensee, database


def nash_candidates(scheme, params, resolution):
    """Boolean mask of cells within one cell of both best responses."""
    axis, feasible, licensee, database = _payoff_grids(scheme, params, resolution)
    rows = np.arange(axis.size)
    licensee_best = np.argmax(licensee, axis=0)
    database_best = np.argmax(database, axis=1)
    near_licensee = np.abs(rows[:, None] - licensee_best[None, :]) <= 1
    near_database = np.abs(rows[None, :] - database_best[:, None]) <= 1
    return axis, feasible & near_licensee & near_database


def grid_nash_oracle(scheme, params, resolution=1e-3):
    """Unique market share equilibrium on the grid, or OracleCandidateError."""
    if not 1e-4 <= resolution <= 1e-2:
        raise DomainError(f'oracle resolution must lie in [1e-4, 1e-2], got {resolution}')
    check_scheme(scheme, params)
    axis, mask = nash_candidates(scheme, params, resolution)
    labels, count = ndimage.label(mask, structure=np.ones((3, 3), dtype=int))
    if count == 0:
        raise OracleCandidateError(f'no grid equilibrium for {scheme}', [])

    centroids = [
        MarketShare.clipped(*(np.interp(c, np.arange(axis.size), axis) for c in centre))
        for centre in ndimage.center_of_mass(mask, labels, range(1, count + 1))
    ]
    if count > 1:
        logger.warning('%s: %d separate grid equilibria', scheme, count)
        raise OracleCandidateError(f'{count} grid equilibria for {scheme}', centroids)
    logger.info('%s grid equilibrium at (%.4f, %.4f)', scheme, centroids[0].eta_l, centroids[0].eta_a)
    return centroids[0]
