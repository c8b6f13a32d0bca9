import math
from unittest import mock

import numpy as np
from django.test import SimpleTestCase

from competition.stage2 import solve_stage2
from dynamics.equilibrium import solve_equilibrium
from dynamics.exceptions import ConvergenceError
from market.exceptions import DomainError
from market.params import (
    MarketShare, ModelParams, PriceProfile, RevenueShare, SensingParams, ServiceChoice, Wholesale,
)
from market.utility import congestion_utility, info_gain

from .agents import agent_based_equilibrium, simulate_agents
from .interference import (
    InterferenceModel, basic_rate_curve, information_gain_curve, monte_carlo_utilities,
)
from .oracle import grid_nash_oracle
from .shapes import shape_checks
from .suite import (
    externality_shape_checks, fixed_point_checks, observation_checks, oracle_checks, sensing_market_checks,
    supermodularity_checks, surplus_checks,
)


def constant_params(**overrides):
    values = dict(alpha1=1.0, beta1=0.0, alpha2=1.0, beta2=1.0)
    values.update(overrides)
    return ModelParams.defaults(**values)


class AgentTests(SimpleTestCase):

    def test_constant_externalities_settle_in_one_round(self):
        n = 10000
        population = simulate_agents(n, PriceProfile(2.0, 0.2), constant_params())
        self.assertEqual(population.rounds, 2)
        self.assertAlmostEqual(population.shares.eta_l, 0.55, delta=1.0 / n)
        self.assertAlmostEqual(population.shares.eta_a, 0.25, delta=1.0 / n)

    def test_free_leasing(self):
        n = 1000
        population = simulate_agents(n, PriceProfile(0.0, 0.3), ModelParams.defaults())
        self.assertEqual(population.count(ServiceChoice.LEASING), n)
        self.assertEqual(population.shares, MarketShare(1.0, 0.0))

    def test_matches_continuum(self):
        n = 20000
        prices, params = PriceProfile(2.0, 0.3), ModelParams.defaults()
        agents = agent_based_equilibrium(n, prices, params)
        continuum = solve_equilibrium(prices, params).shares
        self.assertLessEqual(agents.distance(continuum), max(5e-3, 3.0 / n))

    def test_small_population_rejected(self):
        with self.assertRaises(DomainError):
            agent_based_equilibrium(10, PriceProfile(2.0, 0.3), ModelParams.defaults())


class GridOracleTests(SimpleTestCase):

    def test_constant_externalities(self):
        shares = grid_nash_oracle(RevenueShare(0.0), constant_params(), resolution=0.01)
        self.assertAlmostEqual(shares.eta_l, 37 / 95, delta=0.02)
        self.assertAlmostEqual(shares.eta_a, 39 / 190, delta=0.02)

    def test_agrees_with_best_response_iteration(self):
        params, scheme = ModelParams.defaults(), RevenueShare(0.3)
        oracle = grid_nash_oracle(scheme, params, resolution=1e-3)
        solved = solve_stage2(scheme, params, check_diagonal=False, points=401).shares
        self.assertLessEqual(oracle.distance(solved), 3e-3)

    def test_resolution_range(self):
        with self.assertRaises(DomainError):
            grid_nash_oracle(RevenueShare(0.3), ModelParams.defaults(), resolution=0.1)


class InterferenceTests(SimpleTestCase):

    def test_no_interference(self):
        model = InterferenceModel(mean_tv=0.0, mean_user=0.0, mean_outside=0.0, samples=1000, chunk=300)
        estimate = monte_carlo_utilities(model, 0.2, 0.3)
        expected = math.log2(1.0 + model.tx_power / model.noise)
        self.assertAlmostEqual(estimate.r_basic, expected, places=12)
        self.assertEqual(estimate.r_basic, estimate.r_advanced)

    def test_single_channel_has_no_selection_gain(self):
        model = InterferenceModel(k=1, n_users=10, samples=5000, chunk=1000)
        estimate = monte_carlo_utilities(model, 0.2, 0.5)
        self.assertEqual(estimate.r_basic, estimate.r_advanced)
        self.assertEqual(estimate.gain, 0.0)

    def test_channel_counts(self):
        model = InterferenceModel(k=10, n_users=100)
        self.assertEqual(model.channel_counts(MarketShare(0.2, 0.3)), (3, 5))
        self.assertEqual(model.channel_counts(MarketShare(1.0, 0.0)), (0, 0))

    def test_seed_determinism_across_workers(self):
        model = InterferenceModel(samples=20000, chunk=3000, seed=7)
        serial = monte_carlo_utilities(model, 0.3, 0.4)
        pooled = monte_carlo_utilities(model, 0.3, 0.4, workers=4)
        self.assertEqual(serial, pooled)
        self.assertNotEqual(serial, monte_carlo_utilities(InterferenceModel(samples=20000, chunk=3000, seed=8),
                                                          0.3, 0.4))

    def test_information_gain_non_negative(self):
        model = InterferenceModel(samples=20000, chunk=5000)
        curve = information_gain_curve(model, 0.0, np.linspace(0.1, 0.9, 9))
        self.assertTrue(np.all(curve.values >= 0.0))
        self.assertTrue(np.all(curve.values[1:] > 0.0))

    def test_basic_rate_falls_with_crowding(self):
        model = InterferenceModel(samples=20000, chunk=5000)
        curve = basic_rate_curve(model, np.linspace(0.1, 1.0, 10))
        report = shape_checks(curve.shares, curve.values, curve.stderr, increasing=False, convex=None)
        self.assertTrue(report.holds, report.monotone_violations)
        self.assertEqual(len(curve.rows()), 10)


class ShapeCheckTests(SimpleTestCase):

    def setUp(self):
        self.params = ModelParams.defaults()
        self.grid = np.linspace(0.05, 1.0, 20)

    def test_congestion_utility(self):
        report = shape_checks(self.grid, congestion_utility(self.grid, self.params), increasing=False, convex=True)
        self.assertTrue(report)
        self.assertEqual(report.curvature, 'convex')

    def test_information_gain(self):
        report = shape_checks(self.grid, info_gain(self.grid, self.params), increasing=True, convex=False)
        self.assertTrue(report)

    def test_flags_wrong_direction(self):
        report = shape_checks(self.grid, info_gain(self.grid, self.params), increasing=False, convex=None)
        self.assertEqual(len(report.monotone_violations), self.grid.size - 1)

    def test_noise_tolerance(self):
        values = 1.0 - self.grid
        values[5] += 0.1
        self.assertFalse(shape_checks(self.grid, values, increasing=False, convex=None))
        self.assertTrue(shape_checks(self.grid, values, np.full(self.grid.size, 0.05), increasing=False, convex=None))

    def test_too_few_points(self):
        with self.assertRaises(DomainError):
            shape_checks([0.1, 0.2, 0.3], [1.0, 0.5, 0.2])


class SuiteTests(SimpleTestCase):

    def test_fixed_point_checks(self):
        results = fixed_point_checks(ModelParams.defaults(), np.random.default_rng(5), draws=25)
        self.assertEqual(len(results), 25)
        self.assertTrue(all(result.passed for result in results), [r for r in results if not r.passed])

    def test_externality_shapes(self):
        results = externality_shape_checks(ModelParams.defaults())
        self.assertEqual([r.case for r in results], ['congestion utility', 'information gain'])
        self.assertTrue(all(result.passed for result in results))

    def test_oracle_check_rows(self):
        results = oracle_checks(ModelParams.defaults(), resolution=1e-2, lambdas=(1.8,),
                                schemes=(RevenueShare(0.3),), points=401)
        self.assertEqual(len(results), 1)
        self.assertAlmostEqual(results[0].tolerance, 3e-2)
        self.assertTrue(results[0].passed, results[0].detail)

    def test_surplus_checks_record_stalled_equilibria(self):
        with mock.patch('validation.suite.solve_equilibrium', side_effect=ConvergenceError('stalled', rounds=7)):
            results = surplus_checks(ModelParams.defaults(), np.random.default_rng(1), points=3, samples=1000)
        self.assertEqual(len(results), 3)
        for result in results:
            self.assertFalse(result.passed)
            self.assertTrue(math.isnan(result.value))
            self.assertIn('stalled', result.detail)

    def test_supermodularity_rows(self):
        results = supermodularity_checks(ModelParams.defaults(), lambdas=(1.8,),
                                         schemes=(RevenueShare(0.3), Wholesale(0.5)), grid_resolution=0.05)
        self.assertEqual([r.case for r in results], ['lambda=1.8 rss:0.3', 'lambda=1.8 wps:0.5'])
        self.assertTrue(all(result.passed for result in results))

    def test_observation_checks_on_small_sweeps(self):
        results = observation_checks(ModelParams.defaults(), step=0.7, grid_steps=11, points=401)
        cases = {result.case: result for result in results}
        self.assertTrue(all(result.check == 'observation' for result in results))
        for name in ('lambda: scheme preference crossover', 'lambda: network profit ordering',
                     'lambda: coordination gap', 'lambda: wps gain over pure information',
                     'lambda: equilibrium share bounds', 'cost_leasing: rss social welfare >= wps'):
            self.assertIn(name, cases)
        self.assertTrue(cases['lambda: rss u_db non-decreasing'].passed, cases['lambda: rss u_db non-decreasing'])
        self.assertTrue(all(isinstance(result.passed, bool) for result in results))

    def test_sensing_market_rows(self):
        results = sensing_market_checks(ModelParams.defaults(), SensingParams.defaults(), costs=(0.0, 0.4),
                                        grid_steps=11, points=401)
        self.assertEqual([r.check for r in results], ['sensing_welfare', 'sensing_welfare', 'energy_crossover'])
        self.assertEqual([r.case for r in results], ['c_s=0', 'c_s=0.4', 'c_a=0.1'])
        self.assertTrue(results[0].detail.startswith('integrated '))
        # free sensing costs no energy, so the crossover cannot sit at zero
        self.assertNotEqual(results[-1].value, 0.0)
