"""
Cross-checks of the solvers against the independent oracles, at a scale
chosen by the caller.
"""

import logging
from dataclasses import dataclass, replace

import numpy as np
from django.conf import settings

from benchmarks.sensing import sensing_market_equilibrium
from benchmarks.welfare import energy_cost_comparison, social_welfare
from competition.diagonal import supermodularity_check
from competition.stage2 import solve_stage2
from dynamics.certificate import uniqueness_certificate
from dynamics.equilibrium import best_response_map, multi_start_spread, solve_equilibrium
from dynamics.surplus import consumer_surplus, sampled_surplus
from experiments import observations
from experiments.pipeline import run_three_stage
from experiments.sweep import SweepSpec, run_sweep
from market.exceptions import MarketError
from market.params import PriceProfile, RevenueShare, SensingParams, Wholesale
from market.utility import congestion_utility, info_gain

from .agents import agent_based_equilibrium
from .oracle import grid_nash_oracle
from .shapes import shape_checks

logger = logging.getLogger(__name__)

ORACLE_LAMBDAS = (0.4, 1.0, 1.8)
ORACLE_SCHEMES = (
    RevenueShare(0.0), RevenueShare(0.3), RevenueShare(0.7),
    Wholesale(0.0), Wholesale(0.5), Wholesale(1.0),
)
SENSING_COSTS = (0.0, 0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4)
SENSING_COST_ADVANCED = 0.1


@dataclass
class CheckResult:
    check: str
    case: str
    value: float
    tolerance: float
    passed: bool
    detail: str = ''

    def as_row(self):
        return {
            'check': self.check, 'case': self.case, 'value': self.value,
            'tolerance': self.tolerance, 'passed': self.passed, 'detail': self.detail,
        }


def _random_prices(rng, count, params):
    p_l = rng.uniform(0.1, params.q_leasing - params.alpha1, size=count)
    p_a = rng.uniform(0.0, 1.0, size=count)
    return [PriceProfile(float(a), float(b)) for a, b in zip(p_l, p_a)]


def fixed_point_checks(params, rng, draws=200, tolerance=1e-8):
    results = []
    for prices in _random_prices(rng, draws, params):
        try:
            shares = solve_equilibrium(prices, params).shares
            value = best_response_map(shares, prices, params).distance(shares)
            results.append(CheckResult('fixed_point', str(prices.as_tuple()), value, tolerance, value <= tolerance))
        except MarketError as exc:
            results.append(CheckResult('fixed_point', str(prices.as_tuple()), np.nan, tolerance, False, str(exc)))
    return results


def agent_checks(params, rng, points=5, n=20000):
    tolerance = max(5e-3, 3.0 / n)
    results = []
    for prices in _random_prices(rng, points, params):
        case = f'n={n} prices={prices.as_tuple()}'
        try:
            agents = agent_based_equilibrium(n, prices, params)
            value = agents.distance(solve_equilibrium(prices, params).shares)
            results.append(CheckResult('agents', case, value, tolerance, value <= tolerance))
        except MarketError as exc:
            results.append(CheckResult('agents', case, np.nan, tolerance, False, str(exc)))
    return results


def oracle_checks(params, resolution=1e-3, lambdas=ORACLE_LAMBDAS, schemes=ORACLE_SCHEMES, points=None):
    tolerance = 3.0 * resolution
    results = []
    for lam in lambdas:
        swept = params.with_lambda(lam)
        for scheme in schemes:
            case = f'lambda={lam} {scheme}'
            try:
                solved = solve_stage2(scheme, swept, check_diagonal=False, keep_trace=False, points=points).shares
                value = grid_nash_oracle(scheme, swept, resolution).distance(solved)
                results.append(CheckResult('grid_oracle', case, value, tolerance, value <= tolerance))
            except MarketError as exc:
                results.append(CheckResult('grid_oracle', case, np.nan, tolerance, False, str(exc)))
    return results


def certificate_checks(params, rng, draws=20, starts=10, tolerance=1e-6):
    results = []
    for prices in _random_prices(rng, draws, params):
        if not uniqueness_certificate(prices, params, grid_resolution=1e-2).holds:
            continue
        spread, converged = multi_start_spread(prices, params, starts=starts, seed=int(rng.integers(2**31)))
        results.append(CheckResult('certificate', str(prices.as_tuple()), spread, tolerance,
                                   converged and spread <= tolerance))
    return results


def surplus_checks(params, rng, points=5, samples=None, tolerance=1e-3):
    samples = settings.TVWS['MC_SAMPLES'] if samples is None else samples
    results = []
    for prices in _random_prices(rng, points, params):
        seed = int(rng.integers(2**31))
        try:
            shares = solve_equilibrium(prices, params).shares
            exact = consumer_surplus(shares, prices, params)
        except MarketError as exc:
            results.append(CheckResult('consumer_surplus', str(prices.as_tuple()), np.nan, tolerance, False, str(exc)))
            continue
        mean, stderr = sampled_surplus(shares, prices, params, samples=samples, seed=seed)
        allowed = max(tolerance, 4.0 * stderr)
        value = abs(exact - mean)
        results.append(CheckResult('consumer_surplus', str(prices.as_tuple()), value, allowed, value <= allowed))
    return results


def externality_shape_checks(params, points=21):
    grid = np.linspace(0.05, 1.0, points)
    congestion = shape_checks(grid, congestion_utility(grid, params), increasing=False, convex=True)
    gain = shape_checks(grid, info_gain(grid, params), increasing=params.beta2 >= params.alpha2, convex=False)
    return [
        CheckResult('shape', 'congestion utility', len(congestion.monotone_violations + congestion.curvature_violations),
                    0, congestion.holds),
        CheckResult('shape', 'information gain', len(gain.monotone_violations + gain.curvature_violations),
                    0, gain.holds),
    ]


def _observation_result(sweep, finding):
    return CheckResult('observation', f'{sweep}: {finding.name}', finding.value, np.nan, bool(finding.holds),
                       finding.detail)


def observation_checks(params, sensing=None, step=0.2, grid_steps=None, points=None, workers=1):
    """Expected trends on the lambda and leasing-cost sweeps."""
    sweeps = (
        (SweepSpec('lambda', 0.4, 1.8, step, schemes=observations.LAMBDA_SCHEMES), observations.lambda_findings),
        (SweepSpec('cost_leasing', 0.2, 2.0, step), observations.cost_leasing_findings),
    )
    results = []
    for spec, findings in sweeps:
        frame = run_sweep(spec, params, sensing, workers=workers, grid_steps=grid_steps, points=points)
        try:
            results += [_observation_result(spec.parameter, finding) for finding in findings(frame)]
        except (IndexError, KeyError, ValueError) as exc:
            # every row of some scheme failed
            results.append(CheckResult('observation', spec.parameter, np.nan, np.nan, False, str(exc)))
    return results


def sensing_market_checks(params, sensing=None, costs=SENSING_COSTS, cost_advanced=SENSING_COST_ADVANCED,
                          grid_steps=None, points=None):
    """
    The integrated market against users sensing for themselves: welfare at
    every sensing cost and the cost at which their energy use overtakes the
    database's.
    """
    params = params.replace(cost_advanced=cost_advanced)
    sensing = sensing or SensingParams.defaults()
    stage2_options = {} if points is None else {'points': points}
    try:
        integrated = run_three_stage('rss', params, grid_steps=grid_steps, **stage2_options)
    except MarketError as exc:
        return [CheckResult('sensing_welfare', 'integrated rss', np.nan, 0.0, False, str(exc))]
    welfare = social_welfare(integrated.outcome)

    results, crossover = [], None
    for c_s in costs:
        priced = replace(sensing, c_s=c_s)
        case = f'c_s={c_s:g}'
        try:
            report = sensing_market_equilibrium(params, priced, 'rss', grid_steps=grid_steps, points=points)
        except MarketError as exc:
            results.append(CheckResult('sensing_welfare', case, np.nan, 0.0, False, str(exc)))
            continue
        e_integrated, e_sensing = energy_cost_comparison(integrated, report, params, priced)
        if crossover is None and e_sensing >= e_integrated:
            crossover = c_s
        sensing_welfare = social_welfare(report)
        shortfall = sensing_welfare - welfare
        results.append(CheckResult('sensing_welfare', case, shortfall, 1e-6, shortfall <= 1e-6,
                                   f'integrated {welfare:.4f} sensing {sensing_welfare:.4f}'))

    low, high = observations.CROSSOVER_RANGE
    results.append(CheckResult(
        'energy_crossover', f'c_a={cost_advanced:g}', np.nan if crossover is None else crossover, high,
        crossover is not None and low <= crossover <= high, f'c_s = {crossover} in [{low}, {high}]',
    ))
    return results


def supermodularity_checks(params, lambdas=ORACLE_LAMBDAS, schemes=ORACLE_SCHEMES, grid_resolution=None):
    results = []
    for lam in lambdas:
        swept = params.with_lambda(lam)
        for scheme in schemes:
            report = supermodularity_check(scheme, swept, grid_resolution)
            value = min(report.licensee_margin, report.database_margin)
            results.append(CheckResult('supermodularity', f'lambda={lam} {scheme}', value, 0.0, report.holds))
    return results


def run_validation(params, seed=None, draws=200, agent_points=5, agents=20000, resolution=1e-3,
                   certificate_draws=20, surplus_points=5, surplus_samples=None, points=None,
                   sensing=None, with_observations=True, sweep_step=0.2, grid_steps=None, workers=1):
    """
    Every cross-check; the caller decides what a failure means. The
    observation sweeps dominate the run time and can be switched off.
    """
    rng = np.random.default_rng(settings.TVWS['SEED'] if seed is None else seed)
    results = []
    results += fixed_point_checks(params, rng, draws)
    results += agent_checks(params, rng, agent_points, agents)
    results += oracle_checks(params, resolution, points=points)
    results += certificate_checks(params, rng, certificate_draws)
    results += surplus_checks(params, rng, surplus_points, surplus_samples)
    results += externality_shape_checks(params)
    results += supermodularity_checks(params)
    if with_observations:
        results += observation_checks(params, sensing, sweep_step, grid_steps, points, workers)
        results += sensing_market_checks(params, sensing, grid_steps=grid_steps, points=points)
    failed = [result for result in results if not result.passed]
    for result in failed:
        logger.warning('check %s failed at %s: %.3g > %.3g %s',
                       result.check, result.case, result.value, result.tolerance, result.detail)
    logger.info('validation: %d checks, %d failed', len(results), len(failed))
    return results
