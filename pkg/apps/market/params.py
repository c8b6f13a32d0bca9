"""
Value types shared by every stage of the market: parameters, market shares,
prices, service choices and commission schemes.
"""

import math
from dataclasses import dataclass, field, replace, asdict
from enum import Enum
from typing import Union

from django.conf import settings

from .exceptions import DomainError


def _tolerance():
    return settings.TVWS['COMPARISON_TOL']


@dataclass(frozen=True)
class ModelParams:
    """
    Scalar symbols of the integrated market.

    f(x) = alpha1 - beta1 * x**gamma1 models congestion on the shared channels,
    g(eta_a) = alpha2 + (beta2 - alpha2) * eta_a**gamma2 the information gain.
    """
    alpha1: float
    beta1: float
    gamma1: float
    alpha2: float
    beta2: float
    gamma2: float
    q_leasing: float
    cost_advanced: float
    cost_leasing: float

    def __post_init__(self):
        for name, value in asdict(self).items():
            if not math.isfinite(value):
                raise DomainError(f'{name} must be finite, got {value!r}')
        if not 0.0 < self.gamma1 <= 1.0:
            raise DomainError(f'gamma1 must lie in (0, 1], got {self.gamma1}')
        if not 0.0 < self.gamma2 <= 1.0:
            raise DomainError(f'gamma2 must lie in (0, 1], got {self.gamma2}')
        if self.beta1 < 0:
            raise DomainError(f'beta1 must be non-negative, got {self.beta1}')
        if self.cost_advanced < 0 or self.cost_leasing < 0:
            raise DomainError('energy costs must be non-negative')

    @classmethod
    def defaults(cls, **overrides):
        values = dict(settings.TVWS['DEFAULT_PARAMS'])
        values.update(overrides)
        return cls(**values)

    @property
    def lam(self):
        """Degree of network externality, beta2 / beta1."""
        if self.beta1 <= 0:
            raise DomainError('lambda is undefined when beta1 = 0')
        return self.beta2 / self.beta1

    def with_lambda(self, lam):
        """Copy with beta2 = lam * beta1, everything else fixed."""
        if self.beta1 <= 0:
            raise DomainError('lambda sweeps need beta1 > 0')
        return replace(self, beta2=lam * self.beta1)

    def replace(self, **changes):
        return replace(self, **changes)


@dataclass(frozen=True)
class MarketShare:
    """Point (eta_l, eta_a) of the simplex; eta_b is derived."""
    eta_l: float
    eta_a: float

    def __post_init__(self):
        tol = _tolerance()
        if not (math.isfinite(self.eta_l) and math.isfinite(self.eta_a)):
            raise DomainError('market shares must be finite')
        if self.eta_l < -tol or self.eta_a < -tol or self.eta_l > 1 + tol or self.eta_a > 1 + tol:
            raise DomainError(f'market shares ({self.eta_l}, {self.eta_a}) outside [0, 1]')
        if self.eta_l + self.eta_a > 1 + tol:
            raise DomainError(f'market shares ({self.eta_l}, {self.eta_a}) outside the simplex')

    @classmethod
    def clipped(cls, eta_l, eta_a):
        """Project a raw pair into the simplex, trimming eta_a first."""
        eta_l = min(max(float(eta_l), 0.0), 1.0)
        eta_a = min(max(float(eta_a), 0.0), 1.0 - eta_l)
        return cls(eta_l, eta_a)

    @property
    def eta_b(self):
        return max(1.0 - self.eta_l - self.eta_a, 0.0)

    def distance(self, other):
        return max(abs(self.eta_l - other.eta_l), abs(self.eta_a - other.eta_a))

    def as_tuple(self):
        return (self.eta_l, self.eta_a)


@dataclass(frozen=True)
class PriceProfile:
    """Leasing price p_l and information price p_a."""
    p_l: float
    p_a: float

    def __post_init__(self):
        for name in ('p_l', 'p_a'):
            value = getattr(self, name)
            if not math.isfinite(value) or value < -_tolerance():
                raise DomainError(f'{name} must be finite and non-negative, got {value!r}')

    def as_tuple(self):
        return (self.p_l, self.p_a)


class ServiceChoice(Enum):
    BASIC = 'basic'
    ADVANCED = 'advanced'
    LEASING = 'leasing'
    SENSING = 'sensing'


@dataclass(frozen=True)
class RevenueShare:
    """RSS: the licensee pays the fraction delta of its leasing revenue."""
    delta: float
    kind: str = field(default='rss', init=False)

    def __post_init__(self):
        if not 0.0 <= self.delta <= 1.0:
            raise DomainError(f'revenue share delta must lie in [0, 1], got {self.delta}')

    @property
    def value(self):
        return self.delta

    def with_value(self, value):
        return RevenueShare(value)

    def __str__(self):
        return f'rss:{self.delta:g}'


@dataclass(frozen=True)
class Wholesale:
    """WPS: the licensee pays the price w per lease."""
    w: float
    kind: str = field(default='wps', init=False)

    def __post_init__(self):
        if not math.isfinite(self.w) or self.w < 0:
            raise DomainError(f'wholesale price must be non-negative, got {self.w}')

    @property
    def value(self):
        return self.w

    def with_value(self, value):
        return Wholesale(value)

    def __str__(self):
        return f'wps:{self.w:g}'


CommissionScheme = Union[RevenueShare, Wholesale]

SCHEME_KINDS = ('rss', 'wps')


def scheme_domain(kind, params):
    """Closed interval the commission of a scheme kind is searched over."""
    if kind == 'rss':
        return (0.0, 1.0)
    if kind == 'wps':
        return (0.0, params.q_leasing)
    raise DomainError(f'unknown scheme kind {kind!r}')


def make_scheme(kind, value):
    if kind == 'rss':
        return RevenueShare(value)
    if kind == 'wps':
        return Wholesale(value)
    raise DomainError(f'unknown scheme kind {kind!r}')


def check_scheme(scheme, params):
    """Wholesale prices are bounded by the leasing utility."""
    if isinstance(scheme, Wholesale) and scheme.w > params.q_leasing + _tolerance():
        raise DomainError(f'wholesale price {scheme.w} exceeds Q_L = {params.q_leasing}')
    return scheme


def parse_scheme(text):
    """Parse 'rss:<delta>' or 'wps:<w>'."""
    kind, sep, raw = text.partition(':')
    kind = kind.strip().lower()
    if not sep or kind not in SCHEME_KINDS:
        raise DomainError(f"scheme must look like 'rss:<delta>' or 'wps:<w>', got {text!r}")
    try:
        value = float(raw)
    except ValueError:
        raise DomainError(f'invalid commission value {raw!r}') from None
    return make_scheme(kind, value)


@dataclass(frozen=True)
class SensingParams:
    """Sensing market: constant sensing gain g1 and user sensing cost c_s."""
    g1: float
    c_s: float

    def __post_init__(self):
        if not math.isfinite(self.g1) or self.g1 <= 0:
            raise DomainError(f'sensing gain must be positive, got {self.g1}')
        if not math.isfinite(self.c_s) or self.c_s < 0:
            raise DomainError(f'sensing cost must be non-negative, got {self.c_s}')

    @classmethod
    def defaults(cls, **overrides):
        values = {'g1': settings.TVWS['SENSING_GAIN'], 'c_s': settings.TVWS['SENSING_COST']}
        values.update(overrides)
        return cls(**values)
