"""
Externality functions and per-user utilities.

The functions accept floats or numpy arrays so the grid oracles and
certificates can evaluate them over the whole share simplex at once.
"""

import logging
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from django.conf import settings

from .exceptions import AssumptionError, DomainError
from .params import ServiceChoice

logger = logging.getLogger(__name__)


def _unit_interval(x, name):
    tol = settings.TVWS['COMPARISON_TOL']
    arr = np.asarray(x, dtype=float)
    if np.any(~np.isfinite(arr)) or np.any(arr < -tol) or np.any(arr > 1.0 + tol):
        raise DomainError(f'{name} must lie in [0, 1]')
    clipped = np.clip(arr, 0.0, 1.0)
    return clipped if clipped.ndim else float(clipped)


def congestion_utility(x, params):
    """f(x) = alpha1 - beta1 * x**gamma1 for the unlicensed fraction x."""
    x = _unit_interval(x, 'unlicensed fraction')
    return params.alpha1 - params.beta1 * np.power(x, params.gamma1)


def congestion_derivative(x, params):
    """f'(x); unbounded at x = 0 when gamma1 < 1."""
    x = _unit_interval(x, 'unlicensed fraction')
    with np.errstate(divide='ignore'):
        return -params.gamma1 * params.beta1 * np.power(x, params.gamma1 - 1.0)


def basic_utility(eta_l, params):
    """R_B as a function of the leasing share."""
    return congestion_utility(1.0 - np.asarray(eta_l, dtype=float), params)


def info_gain(eta_a, params):
    """g(eta_a) = alpha2 + (beta2 - alpha2) * eta_a**gamma2."""
    eta_a = _unit_interval(eta_a, 'advanced share')
    return params.alpha2 + (params.beta2 - params.alpha2) * np.power(eta_a, params.gamma2)


def info_gain_derivative(eta_a, params):
    """
    Analytic g'(eta_a) = gamma2 * (beta2 - alpha2) * eta_a**(gamma2 - 1).

    At eta_a = 0 the value is +/-inf when gamma2 < 1 and beta2 != alpha2;
    callers that need finite values evaluate on eta_a >= EPSILON.
    """
    eta_a = _unit_interval(eta_a, 'advanced share')
    slope = params.gamma2 * (params.beta2 - params.alpha2)
    if slope == 0.0:
        return np.zeros_like(eta_a) if np.ndim(eta_a) else 0.0
    with np.errstate(divide='ignore'):
        return slope * np.power(eta_a, params.gamma2 - 1.0)


@dataclass(frozen=True)
class ServiceUtilities:
    r_basic: float
    r_advanced: float
    q_leasing: float
    info_value: float
    ordered: bool

    def as_tuple(self):
        return (self.r_basic, self.r_advanced, self.q_leasing)


def service_utilities(shares, params):
    """R_B, R_A and Q_L at a share point; `ordered` flags Q_L > R_A > R_B."""
    r_basic = float(basic_utility(shares.eta_l, params))
    gain = float(info_gain(shares.eta_a, params))
    r_advanced = r_basic + gain
    ordered = params.q_leasing > r_advanced > r_basic
    if not ordered:
        logger.debug('utility ordering Q_L > R_A > R_B fails at %s', shares)
    return ServiceUtilities(r_basic, r_advanced, params.q_leasing, gain, ordered)


def user_payoff(theta, choice, shares, prices, params, sensing=None):
    """Payoff of a type-theta user for one service; may be negative."""
    if not 0.0 <= theta <= 1.0:
        raise DomainError(f'user type must lie in [0, 1], got {theta}')
    utilities = service_utilities(shares, params)
    if choice is ServiceChoice.BASIC:
        return theta * utilities.r_basic
    if choice is ServiceChoice.ADVANCED:
        return theta * utilities.r_advanced - prices.p_a
    if choice is ServiceChoice.LEASING:
        return theta * params.q_leasing - prices.p_l
    if choice is ServiceChoice.SENSING:
        if sensing is None:
            raise DomainError('sensing payoff needs sensing parameters')
        return theta * (utilities.r_basic + sensing.g1) - sensing.c_s
    raise DomainError(f'unknown service choice {choice!r}')


@dataclass(frozen=True)
class AssumptionCheck:
    name: str
    passed: bool
    witness: float
    note: str = ''


@dataclass(frozen=True)
class AssumptionReport:
    checks: tuple = field(default_factory=tuple)

    @property
    def all_passed(self):
        return all(check.passed for check in self.checks)

    def failed(self):
        return [check for check in self.checks if not check.passed]

    def __getitem__(self, name):
        for check in self.checks:
            if check.name == name:
                return check
        raise KeyError(name)


def validate_params(params):
    """
    Check the separation, congestion and information-gain assumptions.

    Only a non-positive g is fatal; every other failure is reported and the
    run continues, since lambda sweeps deliberately visit beta2 < alpha2.
    """
    g_floor = min(params.alpha2, params.beta2)
    if g_floor <= 0:
        raise AssumptionError(
            f'information gain must stay positive, min(alpha2, beta2) = {g_floor}'
        )

    separation = params.q_leasing - (params.alpha1 + max(params.alpha2, params.beta2))
    congestion_ok = params.beta1 >= 0 and 0 < params.gamma1 <= 1 and params.alpha1 >= params.beta1
    information_ok = params.beta2 >= params.alpha2 and 0 < params.gamma2 <= 1

    checks = (
        AssumptionCheck('separation', separation > 0, separation,
                        '' if separation > 0 else 'Q_L does not dominate alpha1 + max(alpha2, beta2)'),
        AssumptionCheck('congestion', congestion_ok, params.alpha1 - params.beta1,
                        '' if congestion_ok else 'f is not non-negative, non-increasing and convex'),
        AssumptionCheck('information', information_ok, params.beta2 - params.alpha2,
                        '' if information_ok else 'negative-dominant regime, monotonicity of g violated'),
        AssumptionCheck('positivity', True, g_floor),
    )
    report = AssumptionReport(checks)
    for check in report.failed():
        logger.warning('assumption %s failed (witness %.6g): %s', check.name, check.witness, check.note)
    return report


class ExternalityRegime(Enum):
    POSITIVE_DOMINANT = 'positive'
    NEGATIVE_DOMINANT = 'negative'
    NEUTRAL = 'neutral'


@dataclass(frozen=True)
class DominanceReport:
    regime: ExternalityRegime
    indicator: float
    lam: float
    threshold: float


DOMINANCE_FORMS = ('printed', 'analytic')


def externality_dominance(params, shares, form='printed'):
    """
    Classify which externality dominates the advanced utility at a share point.

    The 'printed' indicator is -gamma1*beta1*(eta_a + eta_b)**(gamma1 - 1)
    + gamma2*beta2*eta_a**(gamma2 - 1); `threshold` is the lambda at which it
    vanishes, (eta_a / (eta_a + eta_b))**(1 - gamma) when gamma1 = gamma2.
    The 'analytic' form differentiates g as defined, so beta2 becomes
    beta2 - alpha2 and the threshold moves up by alpha2 / beta1.
    """
    if form not in DOMINANCE_FORMS:
        raise DomainError(f'unknown dominance form {form!r}')
    if shares.eta_a <= 0:
        raise DomainError('dominance indicator is unbounded at eta_a = 0')
    unlicensed = shares.eta_a + shares.eta_b
    congestion_term = params.gamma1 * unlicensed ** (params.gamma1 - 1.0)
    information_term = params.gamma2 * shares.eta_a ** (params.gamma2 - 1.0)
    information_weight = params.beta2 if form == 'printed' else params.beta2 - params.alpha2
    indicator = -params.beta1 * congestion_term + information_weight * information_term
    threshold = congestion_term / information_term
    if form == 'analytic':
        threshold = threshold + params.alpha2 / params.beta1 if params.beta1 > 0 else float('inf')
    if abs(indicator) <= settings.TVWS['COMPARISON_TOL']:
        regime = ExternalityRegime.NEUTRAL
    elif indicator > 0:
        regime = ExternalityRegime.POSITIVE_DOMINANT
    else:
        regime = ExternalityRegime.NEGATIVE_DOMINANT
    lam = params.lam if params.beta1 > 0 else float('inf')
    return DominanceReport(regime, float(indicator), lam, float(threshold))
