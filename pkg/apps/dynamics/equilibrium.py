"""
Stage III: user subscription dynamics for fixed prices.

Users of type theta ~ U[0, 1] pick basic, advanced or leasing service. The
three thresholds split the type line; the best-response map moves the market
shares to the split induced by the current shares, and a market equilibrium
is a fixed point of that map.
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import NamedTuple

import numpy as np
from django.conf import settings
from scipy.optimize import bisect

from market.exceptions import DegenerateDenominatorError
from market.params import MarketShare
from market.utility import basic_utility, congestion_utility, info_gain, service_utilities

from .exceptions import NoSignChangeError

logger = logging.getLogger(__name__)


def _tvws(key, value=None):
    return settings.TVWS[key] if value is None else value


@dataclass(frozen=True)
class Thresholds:
    theta_lb: float
    theta_ab: float
    theta_la: float

    def as_tuple(self):
        return (self.theta_lb, self.theta_ab, self.theta_la)


def _ratio(numerator, denominator, name):
    if denominator <= settings.TVWS['COMPARISON_TOL']:
        raise DegenerateDenominatorError(name, denominator)
    return numerator / denominator


def thresholds(shares, prices, params):
    """Unclamped user-type thresholds at a share point."""
    utilities = service_utilities(shares, params)
    return Thresholds(
        theta_lb=_ratio(prices.p_l, params.q_leasing - utilities.r_basic, 'Q_L - R_B'),
        theta_ab=_ratio(prices.p_a, utilities.info_value, 'R_A - R_B'),
        theta_la=_ratio(prices.p_l - prices.p_a, params.q_leasing - utilities.r_advanced, 'Q_L - R_A'),
    )


class MapStep(NamedTuple):
    shares: MarketShare
    clipped: bool


def best_response_step(shares, prices, params):
    """One synchronous update; `clipped` marks a projection back into the simplex."""
    t = thresholds(shares, prices, params)
    eta_l = max(1.0 - max(t.theta_la, t.theta_lb), 0.0)
    eta_a = max(min(t.theta_la, 1.0) - t.theta_ab, 0.0)
    clipped = eta_l + eta_a > 1.0 + settings.TVWS['COMPARISON_TOL']
    if clipped:
        logger.warning('best response left the simplex at %s, clipping eta_a', shares)
    return MapStep(MarketShare.clipped(eta_l, eta_a), clipped)


def best_response_map(shares, prices, params):
    return best_response_step(shares, prices, params).shares


@dataclass
class DynamicsTrajectory:
    points: list = field(default_factory=list)
    converged: bool = False
    iterations: int = 0
    residual: float = float('inf')
    clipped: int = 0

    @property
    def terminal(self):
        return self.points[-1]


def iterate_dynamics(init, prices, params, tol=None, max_iter=None, keep_points=True):
    """Apply the best-response map from `init` until successive points agree within tol."""
    tol = _tvws('STAGE3_TOL', tol)
    max_iter = _tvws('STAGE3_MAX_ITER', max_iter)
    trajectory = DynamicsTrajectory(points=[init])
    current = init
    for iteration in range(1, max_iter + 1):
        step = best_response_step(current, prices, params)
        trajectory.clipped += step.clipped
        trajectory.residual = step.shares.distance(current)
        trajectory.iterations = iteration
        if keep_points:
            trajectory.points.append(step.shares)
        else:
            trajectory.points[-1:] = [step.shares]
        current = step.shares
        if trajectory.residual <= tol:
            trajectory.converged = True
            break
        if iteration % 1000 == 0:
            logger.debug('dynamics iteration %d, residual %.3e', iteration, trajectory.residual)

    if trajectory.converged:
        logger.info('dynamics converged in %d iterations to (%.6f, %.6f)',
                    trajectory.iterations, current.eta_l, current.eta_a)
    else:
        logger.warning('dynamics stopped after %d iterations, residual %.3e',
                       trajectory.iterations, trajectory.residual)
    return trajectory


class Branch(Enum):
    ADVANCED_ACTIVE = 'active'
    ADVANCED_EMPTY = 'empty'


class StageThreeSolution(NamedTuple):
    shares: MarketShare
    branch: Branch
    residual: float


def _bracketed_root(residual, lower, upper, tol, label):
    low_value, high_value = residual(lower), residual(upper)
    if abs(low_value) <= tol:
        return lower
    if abs(high_value) <= tol:
        return upper
    if low_value * high_value > 0:
        raise NoSignChangeError(
            f'{label} residual keeps its sign on [{lower:.3g}, {upper:.3g}]: '
            f'{low_value:.6g} and {high_value:.6g}',
            lower=low_value, upper=high_value,
        )
    return bisect(residual, lower, upper, xtol=tol,
                  maxiter=settings.TVWS['BISECTION_MAX_STEPS'])


def _solve_empty(prices, params, tol):
    def residual(eta_l):
        denominator = params.q_leasing - congestion_utility(1.0 - eta_l, params)
        theta_lb = _ratio(prices.p_l, denominator, 'Q_L - R_B')
        return max(1.0 - theta_lb, 0.0) - eta_l

    eta_l = _bracketed_root(residual, 0.0, 1.0, tol, 'advanced-empty')
    return MarketShare.clipped(eta_l, 0.0)


def _solve_active(prices, params, tol):
    epsilon = settings.TVWS['EPSILON']

    def leasing_share(eta_a):
        return max(1.0 - eta_a - prices.p_a / info_gain(eta_a, params), 0.0)

    def residual(eta_a):
        eta_l = leasing_share(eta_a)
        r_advanced = basic_utility(eta_l, params) + info_gain(eta_a, params)
        theta_la = _ratio(prices.p_l - prices.p_a, params.q_leasing - r_advanced, 'Q_L - R_A')
        return min(theta_la, 1.0) - (eta_a + prices.p_a / info_gain(eta_a, params))

    eta_a = _bracketed_root(residual, epsilon, 1.0, tol, 'advanced-active')
    return MarketShare.clipped(leasing_share(eta_a), eta_a)


def solve_equilibrium(prices, params, tol=None):
    """
    Fixed point of the best-response map by bisection on a one-variable reduction.

    The branch whose thresholds at the empty market say advanced users exist is
    tried first; a candidate that does not map to itself within 10*tol sends
    the solver to the other branch.
    """
    tol = _tvws('BISECTION_TOL', tol)
    theta_lb_empty = _ratio(prices.p_l, params.q_leasing - congestion_utility(1.0, params), 'Q_L - R_B')
    theta_ab_empty = _ratio(prices.p_a, params.alpha2, 'R_A - R_B')
    if theta_lb_empty > theta_ab_empty:
        order = (Branch.ADVANCED_ACTIVE, Branch.ADVANCED_EMPTY)
    else:
        order = (Branch.ADVANCED_EMPTY, Branch.ADVANCED_ACTIVE)

    solvers = {Branch.ADVANCED_ACTIVE: _solve_active, Branch.ADVANCED_EMPTY: _solve_empty}
    failures = []
    for branch in order:
        try:
            candidate = solvers[branch](prices, params, tol / 100.0)
        except NoSignChangeError as exc:
            failures.append(f'{branch.value}: {exc}')
            continue
        residual = best_response_map(candidate, prices, params).distance(candidate)
        if residual <= 10.0 * tol:
            if branch is not order[0]:
                logger.info('stage III fell back to the %s branch at prices %s', branch.value, prices)
            return StageThreeSolution(candidate, branch, residual)
        failures.append(f'{branch.value}: candidate {candidate.as_tuple()} has map residual {residual:.3e}')

    raise NoSignChangeError('no stage III fixed point found; ' + '; '.join(failures))


def multi_start_spread(prices, params, starts=10, seed=None, tol=None, max_iter=None):
    """
    Run the dynamics from random points of the simplex.

    Returns the largest coordinate distance between terminal points and
    whether every run converged.
    """
    rng = np.random.default_rng(_tvws('SEED', seed))
    terminals, all_converged = [], True
    for _ in range(starts):
        eta_l, eta_a = sorted(rng.uniform(size=2))
        init = MarketShare.clipped(eta_l, eta_a - eta_l)
        trajectory = iterate_dynamics(init, prices, params, tol=tol, max_iter=max_iter, keep_points=False)
        all_converged &= trajectory.converged
        terminals.append(trajectory.terminal.as_tuple())
    terminals = np.array(terminals)
    spread = float(np.max(np.ptp(terminals, axis=0)))
    return spread, all_converged
