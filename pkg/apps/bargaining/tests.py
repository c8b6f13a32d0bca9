from unittest import mock

import numpy as np
from django.test import SimpleTestCase, override_settings
from django.conf import settings

from competition.stage2 import solve_stage2
from dynamics.exceptions import ConvergenceError
from market.exceptions import DomainError
from market.params import ModelParams
from market.utility import info_gain

from .disagreement import disagreement_point
from .nash import nash_product, solve_bargaining

FAST = {'points': 401}


class DisagreementTests(SimpleTestCase):

    def test_unit_information_gain(self):
        point = disagreement_point(ModelParams.defaults(beta2=1.0))
        self.assertEqual(point.u_licensee, 0.0)
        self.assertAlmostEqual(point.eta_a, 0.5, places=9)
        self.assertAlmostEqual(point.p_a, 0.5, places=9)
        self.assertAlmostEqual(point.u_database, 0.25, places=12)

    def test_scales_with_constant_gain(self):
        point = disagreement_point(ModelParams.defaults(alpha2=2.0, beta2=2.0))
        self.assertAlmostEqual(point.p_a, 1.0, places=9)
        self.assertAlmostEqual(point.u_database, 0.5, places=12)

    def test_cost_adjusted_variant(self):
        point = disagreement_point(ModelParams.defaults(beta2=1.0), cost_adjusted=True)
        self.assertAlmostEqual(point.eta_a, 0.4, places=9)
        self.assertAlmostEqual(point.u_database, 0.16, places=12)

    @override_settings(TVWS={**settings.TVWS, 'DISAGREEMENT_COST_ADJUSTED': True})
    def test_cost_adjusted_from_settings(self):
        self.assertAlmostEqual(disagreement_point(ModelParams.defaults(beta2=1.0)).u_database, 0.16, places=12)

    def test_defaults_match_fine_grid(self):
        params = ModelParams.defaults()
        eta = np.linspace(0.0, 1.0, 100_001)
        oracle = np.max((1.0 - eta) * info_gain(eta, params) * eta)
        self.assertAlmostEqual(disagreement_point(params).u_database, oracle, places=8)


class NashProductTests(SimpleTestCase):

    def test_licensee_keeps_nothing(self):
        point = nash_product(1.0, ModelParams.defaults(), 'rss', **FAST)
        self.assertTrue(point.feasible)
        self.assertEqual(point.product, 0.0)
        self.assertEqual(point.report.payoffs.u_licensee, 0.0)

    def test_interior_commission(self):
        point = nash_product(0.3, ModelParams.defaults(), 'rss', **FAST)
        self.assertTrue(point.feasible)
        self.assertGreater(point.product, 0.0)

    def test_printed_pairing(self):
        own = nash_product(0.3, ModelParams.defaults(), 'rss', pairing='own', **FAST)
        printed = nash_product(0.3, ModelParams.defaults(), 'rss', pairing='printed', **FAST)
        self.assertEqual(own.report.shares, printed.report.shares)
        self.assertNotEqual(own.product, printed.product)

    def test_outside_domain(self):
        with self.assertRaises(DomainError):
            nash_product(1.5, ModelParams.defaults(), 'rss')
        with self.assertRaises(DomainError):
            nash_product(6.5, ModelParams.defaults(), 'wps')


class SolveBargainingTests(SimpleTestCase):

    def test_unprofitable_leasing(self):
        outcome = solve_bargaining('rss', ModelParams.defaults(cost_leasing=7.0), grid_steps=11, **FAST)
        self.assertFalse(outcome.feasible)
        self.assertIsNone(outcome.stage2)
        self.assertEqual(outcome.scheme_kind, 'rss')
        self.assertTrue(np.all(np.isinf(outcome.products)))

    def test_stalled_grid_point_is_skipped(self):
        def stalls_at_tenth(scheme, params, **options):
            if abs(scheme.value - 0.1) < 1e-12:
                raise ConvergenceError('stage II stalled', rounds=1)
            return solve_stage2(scheme, params, **options)

        with mock.patch('bargaining.nash.solve_stage2', side_effect=stalls_at_tenth):
            with self.assertLogs('bargaining.nash', level='WARNING') as logs:
                outcome = solve_bargaining('rss', ModelParams.defaults(), grid_steps=11, **FAST)
        self.assertTrue(outcome.feasible)
        self.assertEqual(outcome.scheme_kind, 'rss')
        self.assertTrue(np.isneginf(outcome.products[1]))
        self.assertTrue(any('skipping commission 0.1' in line for line in logs.output))
        self.assertTrue(0.0 < outcome.commission < 1.0)

    def test_revenue_share(self):
        outcome = solve_bargaining('rss', ModelParams.defaults(), grid_steps=21, **FAST)
        self.assertTrue(outcome.feasible)
        self.assertTrue(0.0 < outcome.commission < 1.0)
        payoffs = outcome.stage2.payoffs
        self.assertGreaterEqual(payoffs.u_database - outcome.disagreement.u_database, -1e-9)
        self.assertGreaterEqual(payoffs.u_licensee, -1e-9)
        index = int(np.argmax(outcome.products))
        neighbours = outcome.products[max(index - 1, 0):index + 2]
        self.assertGreaterEqual(outcome.nash_product, np.max(neighbours))
        self.assertTrue(outcome.unimodal)

    def test_wholesale(self):
        outcome = solve_bargaining('wps', ModelParams.defaults(), grid_steps=21, **FAST)
        self.assertTrue(outcome.feasible)
        self.assertTrue(0.0 < outcome.commission < 6.0)
        self.assertEqual(outcome.stage2.scheme.kind, 'wps')

    def test_grid_consistency(self):
        params = ModelParams.defaults()
        coarse = solve_bargaining('rss', params, grid_steps=11, **FAST)
        fine = solve_bargaining('rss', params, grid_steps=21, **FAST)
        self.assertLessEqual(abs(coarse.commission - fine.commission), 0.1)

    def test_grid_too_coarse(self):
        with self.assertRaises(DomainError):
            solve_bargaining('rss', ModelParams.defaults(), grid_steps=5)
