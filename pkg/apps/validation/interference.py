"""
Monte Carlo model of unlicensed-channel interference behind the basic and
advanced utilities.

Each of k channels carries interference from the TV station and from the
advanced users on it (both reported by the database), plus interference from
outside systems and basic users that nobody reports. A basic user lands on a
random channel; an advanced user picks the channel with the least reported
interference.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from django.conf import settings

from market.exceptions import DomainError
from market.params import MarketShare

logger = logging.getLogger(__name__)


def _mc(key):
    return settings.TVWS[key]


@dataclass(frozen=True)
class InterferenceModel:
    """Exponential interference components with configurable means."""
    k: int = field(default_factory=lambda: _mc('MC_CHANNELS'))
    n_users: int = field(default_factory=lambda: _mc('MC_USERS'))
    mean_tv: float = field(default_factory=lambda: _mc('MC_MEAN_TV'))
    mean_user: float = field(default_factory=lambda: _mc('MC_MEAN_USER'))
    mean_outside: float = field(default_factory=lambda: _mc('MC_MEAN_OUTSIDE'))
    tx_power: float = field(default_factory=lambda: _mc('MC_TX_POWER'))
    noise: float = field(default_factory=lambda: _mc('MC_NOISE'))
    samples: int = field(default_factory=lambda: _mc('MC_SAMPLES'))
    chunk: int = field(default_factory=lambda: _mc('MC_CHUNK'))
    seed: int = field(default_factory=lambda: _mc('SEED'))

    def __post_init__(self):
        if self.k < 1 or self.n_users < 1:
            raise DomainError('interference model needs at least one channel and one user')
        if min(self.mean_tv, self.mean_user, self.mean_outside) < 0:
            raise DomainError('interference means must be non-negative')
        if self.tx_power <= 0 or self.noise <= 0:
            raise DomainError('transmit power and noise must be positive')
        if self.samples < 2 or self.chunk < 1:
            raise DomainError('need at least two samples and a positive chunk size')

    def rate(self, interference):
        """Shannon rate log2(1 + P / (I + n0))."""
        return np.log2(1.0 + self.tx_power / (interference + self.noise))

    def channel_counts(self, shares):
        """(advanced, basic) users per channel, rounded to whole users."""
        per_channel = self.n_users / self.k
        total = int(round(per_channel * (1.0 - shares.eta_l)))
        advanced = min(int(round(per_channel * shares.eta_a)), total)
        return advanced, total - advanced


@dataclass(frozen=True)
class UtilityEstimate:
    r_basic: float
    r_advanced: float
    se_basic: float
    se_advanced: float
    gain: float
    se_gain: float

    def as_tuple(self):
        return (self.r_basic, self.r_advanced)


def _summed_users(rng, count, mean, size):
    if count == 0 or mean == 0:
        return np.zeros(size)
    # A sum of `count` i.i.d. exponentials is gamma distributed.
    return rng.gamma(count, mean, size=size)


def _draw_chunk(model, advanced, basic, seed_seq, size):
    rng = np.random.default_rng(seed_seq)
    known = rng.exponential(model.mean_tv, size=(size, model.k))
    known += _summed_users(rng, advanced, model.mean_user, (size, model.k))
    unknown = rng.exponential(model.mean_outside, size=size)
    unknown += _summed_users(rng, basic, model.mean_user, size)

    basic_rate = model.rate(known[:, 0] + unknown)
    advanced_rate = model.rate(known.min(axis=1) + unknown)
    gain = advanced_rate - basic_rate
    return np.array([
        [column.sum(), np.square(column).sum()]
        for column in (basic_rate, advanced_rate, gain)
    ])


def _mean_and_error(total, squares, n):
    mean = total / n
    variance = max(squares / n - mean * mean, 0.0) * n / (n - 1)
    return mean, math.sqrt(variance / n)


def monte_carlo_utilities(model, eta_l, eta_a, workers=1):
    """
    Estimated (r_basic, r_advanced) at a share point, with standard errors.

    Draws are split into fixed-size chunks seeded from one SeedSequence and
    summed in chunk order, so the estimate depends on the seed only.
    """
    shares = MarketShare(eta_l, eta_a)
    advanced, basic = model.channel_counts(shares)
    sizes = [model.chunk] * (model.samples // model.chunk)
    if model.samples % model.chunk:
        sizes.append(model.samples % model.chunk)
    children = np.random.SeedSequence(model.seed).spawn(len(sizes))

    def run(index):
        return _draw_chunk(model, advanced, basic, children[index], sizes[index])

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run, range(len(sizes))))
    else:
        parts = [run(index) for index in range(len(sizes))]

    totals = np.zeros((3, 2))
    for part in parts:
        totals += part
    (r_basic, se_basic), (r_advanced, se_advanced), (gain, se_gain) = (
        _mean_and_error(total, squares, model.samples) for total, squares in totals
    )
    logger.debug('k=%d advanced=%d basic=%d per channel: r_basic=%.5f r_advanced=%.5f',
                 model.k, advanced, basic, r_basic, r_advanced)
    return UtilityEstimate(r_basic, r_advanced, se_basic, se_advanced, gain, se_gain)


@dataclass
class UtilityCurve:
    """Sampled utility along one share axis."""
    label: str
    shares: np.ndarray
    values: np.ndarray
    stderr: np.ndarray

    def rows(self):
        return [
            {'share': float(x), 'mean_rate': float(v), 'stderr': float(s)}
            for x, v, s in zip(self.shares, self.values, self.stderr)
        ]


def basic_rate_curve(model, unlicensed_shares, workers=1):
    """r_basic against the unlicensed share 1 - eta_l, with nobody advanced."""
    estimates = [monte_carlo_utilities(model, 1.0 - x, 0.0, workers) for x in unlicensed_shares]
    return UtilityCurve(
        'r_basic',
        np.asarray(unlicensed_shares, dtype=float),
        np.array([e.r_basic for e in estimates]),
        np.array([e.se_basic for e in estimates]),
    )


def information_gain_curve(model, eta_l, advanced_shares, workers=1):
    """r_advanced - r_basic against eta_a at a fixed leasing share."""
    estimates = [monte_carlo_utilities(model, eta_l, eta_a, workers) for eta_a in advanced_shares]
    return UtilityCurve(
        'information_gain',
        np.asarray(advanced_shares, dtype=float),
        np.array([e.gain for e in estimates]),
        np.array([e.se_gain for e in estimates]),
    )
