"""
Stage II: the database and the licensee compete for market share.

Both firms best-respond to each other's share of the previous round
(Jacobi updates), starting from no leasing and a fully advanced market.
"""

import logging
from dataclasses import dataclass, field

from django.conf import settings

from dynamics.exceptions import ConvergenceError
from market.params import MarketShare, PriceProfile, check_scheme
from market.search import grid_maximize

from .diagonal import dominant_diagonal_check
from .payoffs import (
    FirmPayoffs, database_foc, database_payoff, firm_payoffs, licensee_foc,
    licensee_objective, shares_to_prices,
)

logger = logging.getLogger(__name__)


def _tvws(key, value=None):
    return settings.TVWS[key] if value is None else value


def licensee_best_response(eta_a, scheme, params, points=None):
    """Leasing share maximizing the licensee's margin against a fixed advanced share."""
    points = _tvws('BEST_RESPONSE_POINTS', points)
    result = grid_maximize(
        lambda eta_l: licensee_objective(eta_l, eta_a, scheme, params),
        0.0, max(1.0 - eta_a, 0.0), points,
        derivative=lambda eta_l: float(licensee_foc(eta_l, eta_a, scheme, params)),
    )
    return result.x


def database_best_response(eta_l, scheme, params, points=None):
    """Advanced share maximizing the database payoff against a fixed leasing share."""
    points = _tvws('BEST_RESPONSE_POINTS', points)
    result = grid_maximize(
        lambda eta_a: database_payoff(eta_l, eta_a, scheme, params),
        0.0, max(1.0 - eta_l, 0.0), points,
        derivative=lambda eta_a: float(database_foc(eta_a, eta_l, scheme, params)),
    )
    return result.x


@dataclass
class StageIIReport:
    scheme: object
    shares: MarketShare
    prices: PriceProfile
    payoffs: FirmPayoffs
    rounds: int
    converged: bool
    foc_residuals: tuple
    dominant_diagonal_holds: bool = None
    bounds_hold: bool = True
    oscillation_detected: bool = False
    trace: list = field(default_factory=list)


def stage2_report(scheme, shares, params, rounds=0, converged=True, check_diagonal=True, **extra):
    """Prices, payoffs and certificates for a share point."""
    foc = (
        float(licensee_foc(shares.eta_l, shares.eta_a, scheme, params)),
        float(database_foc(shares.eta_a, shares.eta_l, scheme, params)),
    )
    bounds_hold = 0.0 < shares.eta_l < 0.5 and shares.eta_l + shares.eta_a < 1.0
    diagonal = dominant_diagonal_check(scheme, params).holds if check_diagonal else None
    return StageIIReport(
        scheme=scheme,
        shares=shares,
        prices=shares_to_prices(shares, params),
        payoffs=firm_payoffs(shares, scheme, params),
        rounds=rounds,
        converged=converged,
        foc_residuals=foc,
        dominant_diagonal_holds=diagonal,
        bounds_hold=bounds_hold,
        **extra,
    )


def solve_stage2(scheme, params, tol=None, max_rounds=None, points=None,
                 init=None, check_diagonal=True, keep_trace=True):
    """
    Best-response iteration to a market share equilibrium.

    A period-two cycle in the simultaneous updates switches the remaining
    rounds to sequential updates, which move monotonically in this game.
    """
    check_scheme(scheme, params)
    tol = _tvws('STAGE2_TOL', tol)
    max_rounds = _tvws('STAGE2_MAX_ROUNDS', max_rounds)
    current = init or MarketShare(0.0, 1.0)
    previous = None
    sequential = oscillation = False
    trace = [current] if keep_trace else []
    converged = False

    rounds = 0
    for rounds in range(1, max_rounds + 1):
        eta_l = licensee_best_response(current.eta_a, scheme, params, points)
        eta_a = database_best_response(eta_l if sequential else current.eta_l, scheme, params, points)
        if eta_l + eta_a > 1.0 + settings.TVWS['COMPARISON_TOL']:
            logger.debug('round %d responses (%.6f, %.6f) clipped into the simplex', rounds, eta_l, eta_a)
        step = MarketShare.clipped(eta_l, eta_a)
        if keep_trace:
            trace.append(step)
        moved = step.distance(current)
        if moved <= tol:
            current, converged = step, True
            break
        if not sequential and previous is not None and step.distance(previous) <= tol:
            logger.warning('%s: simultaneous updates cycle with period two, switching to sequential', scheme)
            sequential = oscillation = True
        previous, current = current, step

    report = stage2_report(
        scheme, current, params, rounds=rounds, converged=converged,
        check_diagonal=check_diagonal, oscillation_detected=oscillation, trace=trace,
    )
    if not converged:
        raise ConvergenceError(
            f'stage II did not converge for {scheme} within {max_rounds} rounds',
            last=report, rounds=rounds, oscillating=oscillation,
        )
    if not report.bounds_hold:
        logger.warning('%s equilibrium (%.6f, %.6f) outside 0 < eta_l < 1/2, eta_l + eta_a < 1',
                       scheme, current.eta_l, current.eta_a)
    logger.info('%s stage II converged in %d rounds at (%.6f, %.6f)',
                scheme, rounds, current.eta_l, current.eta_a)
    return report
