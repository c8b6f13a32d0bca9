"""
Stage I: the database and the licensee bargain over the commission.

The symmetric Nash product of the payoff gains over the disagreement point
is maximized over the revenue share delta in [0, 1] or the wholesale price
w in [0, Q_L]. Every evaluation solves the whole Stage II game.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from django.conf import settings
from scipy.optimize import minimize_scalar

from competition.stage2 import solve_stage2
from dynamics.exceptions import ConvergenceError
from market.exceptions import DomainError
from market.params import make_scheme, scheme_domain

from .disagreement import disagreement_point

logger = logging.getLogger(__name__)

PAIRINGS = ('own', 'printed')


@dataclass
class NashPoint:
    value: float
    product: float
    report: object
    feasible: bool


@dataclass
class BargainingOutcome:
    scheme: object
    stage2: object
    nash_product: float
    disagreement: object
    feasible: bool
    pairing: str = 'own'
    grid: np.ndarray = field(default=None, repr=False)
    products: np.ndarray = field(default=None, repr=False)
    scheme_kind: str = ''

    @property
    def commission(self):
        return self.scheme.value if self.scheme is not None else float('nan')

    @property
    def unimodal(self):
        """Finite grid products rise then fall."""
        if self.products is None:
            return False
        finite = self.products[np.isfinite(self.products)]
        slopes = np.sign(np.diff(finite))
        slopes = slopes[slopes != 0]
        return bool(np.count_nonzero(np.diff(slopes)) <= 1)


def _gains(payoffs, disagreement, pairing):
    if pairing == 'own':
        return (payoffs.u_database - disagreement.u_database,
                payoffs.u_licensee - disagreement.u_licensee)
    if pairing == 'printed':
        return (payoffs.u_database - disagreement.u_licensee,
                payoffs.u_licensee - disagreement.u_database)
    raise DomainError(f'unknown bargaining pairing {pairing!r}')


def nash_product(value, params, scheme_kind, pairing=None, disagreement=None, **stage2_options):
    """Nash product at one commission; -inf when a participation constraint fails."""
    pairing = settings.TVWS['BARGAINING_PAIRING'] if pairing is None else pairing
    lower, upper = scheme_domain(scheme_kind, params)
    if not lower <= value <= upper:
        raise DomainError(f'{scheme_kind} commission {value} outside [{lower}, {upper}]')
    disagreement = disagreement or disagreement_point(params)
    stage2_options.setdefault('check_diagonal', False)
    stage2_options.setdefault('keep_trace', False)

    report = solve_stage2(make_scheme(scheme_kind, value), params, **stage2_options)
    database_gain, licensee_gain = _gains(report.payoffs, disagreement, pairing)
    feasible = database_gain >= 0.0 and licensee_gain >= 0.0
    product = database_gain * licensee_gain if feasible else -math.inf
    return NashPoint(value, product, report, feasible)


def solve_bargaining(scheme_kind, params, grid_steps=None, pairing=None, workers=1,
                     xatol=1e-6, **stage2_options):
    """
    Grid search over the commission, then bounded refinement between the
    neighbours of the best grid point.
    """
    grid_steps = settings.TVWS['BARGAINING_GRID_STEPS'] if grid_steps is None else grid_steps
    pairing = settings.TVWS['BARGAINING_PAIRING'] if pairing is None else pairing
    if grid_steps < 11:
        raise DomainError(f'bargaining grid needs at least 11 steps, got {grid_steps}')
    disagreement = disagreement_point(params)
    lower, upper = scheme_domain(scheme_kind, params)
    grid = np.linspace(lower, upper, grid_steps)

    def evaluate(value):
        try:
            return nash_product(float(value), params, scheme_kind, pairing, disagreement, **stage2_options)
        except ConvergenceError as exc:
            logger.warning('%s bargaining: skipping commission %.6g, stage II did not converge (%s)',
                           scheme_kind, value, exc)
            return NashPoint(float(value), -math.inf, None, False)

    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            points = list(pool.map(evaluate, grid))
    else:
        points = [evaluate(value) for value in grid]
    products = np.array([point.product for point in points])

    if not np.any(np.isfinite(products)):
        logger.warning('%s bargaining: no commission satisfies both participation constraints', scheme_kind)
        return BargainingOutcome(None, None, 0.0, disagreement, False, pairing, grid, products,
                                 scheme_kind=scheme_kind)

    index = int(np.argmax(products))
    best = points[index]
    left, right = grid[max(index - 1, 0)], grid[min(index + 1, grid.size - 1)]
    refined = minimize_scalar(
        lambda value: -evaluate(value).product,
        bounds=(left, right), method='bounded', options={'xatol': xatol},
    )
    if refined.success and np.isfinite(refined.fun) and -refined.fun > best.product:
        best = evaluate(refined.x)

    solution = solve_stage2(make_scheme(scheme_kind, best.value), params, **{
        **stage2_options, 'check_diagonal': True, 'keep_trace': False,
    })
    logger.info('%s bargaining solved at %.6g (Nash product %.6g)', scheme_kind, best.value, best.product)
    return BargainingOutcome(solution.scheme, solution, best.product, disagreement, True, pairing, grid, products,
                             scheme_kind=scheme_kind)
