"""
Parameter sweeps over the market: one row per (parameter value, scheme).
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np
import pandas as pd

from benchmarks.schemes import coordination_optimum, pure_information_market, third_party_scheme
from benchmarks.sensing import sensing_market_equilibrium
from dynamics.equilibrium import best_response_map
from market.exceptions import DomainError, MarketError
from market.params import SensingParams

from .pipeline import run_three_stage

logger = logging.getLogger(__name__)

SWEEP_PARAMETERS = ('lambda', 'cost_leasing', 'cost_sensing')
SWEEP_SCHEMES = ('rss', 'wps', 'coordination', 'pure_info', 'third_party', 'sensing')
SWEEP_COLUMNS = (
    'parameter', 'value', 'scheme', 'delta_or_w', 'eta_l', 'eta_a', 'eta_s', 'p_l', 'p_a',
    'u_sl', 'u_db', 'network_profit', 'consumer_surplus', 'social_welfare', 'energy_cost',
    'converged', 'agreed', 'bounds_hold', 'dominant_diagonal', 'fixed_point_residual', 'error',
)


@dataclass(frozen=True)
class SweepSpec:
    parameter: str
    start: float
    stop: float
    step: float
    schemes: tuple = ('rss', 'wps')
    outputs: tuple = None

    def __post_init__(self):
        if self.parameter not in SWEEP_PARAMETERS:
            raise DomainError(f'cannot sweep {self.parameter!r}; choose from {", ".join(SWEEP_PARAMETERS)}')
        if not self.start < self.stop or self.step <= 0:
            raise DomainError('a sweep needs start < stop and a positive step')
        unknown = set(self.schemes) - set(SWEEP_SCHEMES)
        if unknown or not self.schemes:
            raise DomainError(f'unknown schemes: {", ".join(sorted(unknown)) or "(none given)"}')
        if self.outputs is not None:
            missing = set(self.outputs) - set(SWEEP_COLUMNS)
            if missing:
                raise DomainError(f'unknown output columns: {", ".join(sorted(missing))}')

    def values(self):
        """Inclusive grid start, start + step, ..., up to stop."""
        count = int(math.floor((self.stop - self.start) / self.step + 1e-9)) + 1
        return [round(self.start + i * self.step, 12) for i in range(count)]

    def columns(self):
        return self.outputs or SWEEP_COLUMNS

    def apply(self, value, params, sensing):
        """Market and sensing parameters at one grid value."""
        if self.parameter == 'lambda':
            return params.with_lambda(value), sensing
        if self.parameter == 'cost_leasing':
            return params.replace(cost_leasing=value), sensing
        return params, replace(sensing, c_s=value)


def _residual(report, params):
    return best_response_map(report.shares, report.prices, params).distance(report.shares)


def scheme_row(scheme, params, sensing, grid_steps=None, pairing=None, points=None, workers=1):
    """Solve one scheme or benchmark and return its output row."""
    stage2_options = {} if points is None else {'points': points}
    if scheme in ('rss', 'wps'):
        return run_three_stage(scheme, params, grid_steps=grid_steps, pairing=pairing,
                               workers=workers, **stage2_options).as_row()
    if scheme == 'coordination':
        report = coordination_optimum(params)
    elif scheme == 'pure_info':
        report = pure_information_market(params)
    elif scheme == 'third_party':
        report = third_party_scheme(params, check_diagonal=False, keep_trace=False, **stage2_options)
    elif scheme == 'sensing':
        report = sensing_market_equilibrium(params, sensing, 'rss', grid_steps=grid_steps, points=points)
        return report.as_row()
    else:
        raise DomainError(f'unknown scheme {scheme!r}')
    row = report.as_row()
    row['fixed_point_residual'] = _residual(report, params)
    return row


def run_sweep(spec, params, sensing=None, workers=1, grid_steps=None, pairing=None, points=None):
    """
    Evaluate every grid value for every scheme. A failing row keeps its
    parameter value and scheme and carries the error message instead of numbers.
    """
    sensing = sensing or SensingParams.defaults()
    tasks = [(value, scheme) for value in spec.values() for scheme in spec.schemes]

    def evaluate(task):
        value, scheme = task
        row = {'parameter': spec.parameter, 'value': value, 'scheme': scheme, 'error': ''}
        try:
            swept, swept_sensing = spec.apply(value, params, sensing)
            row.update(scheme_row(scheme, swept, swept_sensing, grid_steps, pairing, points))
        except MarketError as exc:
            logger.warning('%s=%s %s failed: %s', spec.parameter, value, scheme, exc)
            row['error'] = str(exc)
        return row

    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(evaluate, tasks))
    else:
        rows = [evaluate(task) for task in tasks]

    frame = pd.DataFrame(rows).reindex(columns=list(spec.columns()))
    logger.info('%s sweep: %d rows, %d failed', spec.parameter, len(frame),
                int(np.count_nonzero(frame['error'].fillna('') != '')) if 'error' in frame else 0)
    return frame
