import numpy as np
from django.test import SimpleTestCase

from dynamics.equilibrium import solve_equilibrium
from dynamics.exceptions import ConvergenceError
from market.params import MarketShare, ModelParams, PriceProfile, RevenueShare, Wholesale

from .diagonal import dominant_diagonal_check, supermodularity_check
from .payoffs import firm_payoffs, shares_to_prices
from .stage2 import database_best_response, licensee_best_response, solve_stage2


def constant_params(**overrides):
    values = dict(alpha1=1.0, beta1=0.0, alpha2=1.0, beta2=1.0)
    values.update(overrides)
    return ModelParams.defaults(**values)


class InversePriceTests(SimpleTestCase):

    def test_constant_externalities(self):
        prices = shares_to_prices(MarketShare(0.55, 0.25), constant_params())
        self.assertAlmostEqual(prices.p_l, 2.0)
        self.assertAlmostEqual(prices.p_a, 0.2)

    def test_no_advanced_users(self):
        prices = shares_to_prices(MarketShare(0.5, 0.0), constant_params())
        self.assertAlmostEqual(prices.p_l, 2.5)
        self.assertAlmostEqual(prices.p_a, 0.5)

    def test_negative_price_is_clamped_with_warning(self):
        params = constant_params(q_leasing=1.5)
        with self.assertLogs('competition.payoffs', level='WARNING') as logs:
            prices = shares_to_prices(MarketShare(0.2, 0.6), params)
        self.assertEqual(prices.p_l, 0.0)
        self.assertAlmostEqual(prices.p_a, 0.2)
        self.assertIn('clamping to zero', logs.output[0])

    def test_round_trip_from_prices(self):
        params = ModelParams.defaults()
        shares = solve_equilibrium(PriceProfile(2.0, 0.3), params).shares
        prices = shares_to_prices(shares, params)
        self.assertAlmostEqual(prices.p_l, 2.0, places=8)
        self.assertAlmostEqual(prices.p_a, 0.3, places=8)

    def test_round_trip_from_shares(self):
        params = ModelParams.defaults()
        for shares in (MarketShare(0.3, 0.3), MarketShare(0.4, 0.2), MarketShare(0.2, 0.5)):
            solved = solve_equilibrium(shares_to_prices(shares, params), params).shares
            self.assertLessEqual(solved.distance(shares), 1e-4)


class FirmPayoffTests(SimpleTestCase):

    def setUp(self):
        self.params = constant_params()
        self.shares = MarketShare(0.55, 0.25)

    def test_revenue_share(self):
        payoffs = firm_payoffs(self.shares, RevenueShare(0.2), self.params)
        self.assertAlmostEqual(payoffs.u_licensee, 0.484)
        self.assertAlmostEqual(payoffs.u_database, 0.121)

    def test_wholesale(self):
        payoffs = firm_payoffs(self.shares, Wholesale(0.5), self.params)
        self.assertAlmostEqual(payoffs.u_licensee, 0.33)
        self.assertAlmostEqual(payoffs.u_database, 0.275)

    def test_no_commission(self):
        payoffs = firm_payoffs(self.shares, RevenueShare(0.0), self.params)
        self.assertAlmostEqual(payoffs.u_database, (0.2 - 0.2) * 0.25)
        self.assertEqual(payoffs, firm_payoffs(self.shares, Wholesale(0.0), self.params))


class BestResponseTests(SimpleTestCase):

    def test_licensee_vertex(self):
        self.assertAlmostEqual(licensee_best_response(0.0, RevenueShare(0.0), constant_params()), 0.41, places=10)

    def test_licensee_ignores_revenue_share(self):
        params = ModelParams.defaults()
        self.assertEqual(
            licensee_best_response(0.2, RevenueShare(0.0), params),
            licensee_best_response(0.2, RevenueShare(0.7), params),
        )

    def test_database_vertex(self):
        self.assertAlmostEqual(database_best_response(0.0, RevenueShare(0.0), constant_params()), 0.4, places=10)

    def test_database_ignores_wholesale_price(self):
        params = ModelParams.defaults()
        self.assertAlmostEqual(
            database_best_response(0.3, Wholesale(0.0), params),
            database_best_response(0.3, Wholesale(1.0), params),
            places=10,
        )

    def test_full_leasing_leaves_no_room(self):
        self.assertEqual(database_best_response(1.0, RevenueShare(0.3), ModelParams.defaults()), 0.0)


class SolveStageTwoTests(SimpleTestCase):

    def test_constant_externalities(self):
        report = solve_stage2(RevenueShare(0.0), constant_params())
        self.assertTrue(report.converged)
        self.assertAlmostEqual(report.shares.eta_l, 37 / 95, places=7)
        self.assertAlmostEqual(report.shares.eta_a, 39 / 190, places=7)
        self.assertTrue(report.dominant_diagonal_holds)

    def test_defaults_revenue_share(self):
        params = ModelParams.defaults()
        report = solve_stage2(RevenueShare(0.3), params)
        self.assertTrue(report.converged)
        self.assertTrue(report.bounds_hold)
        np.testing.assert_allclose(report.foc_residuals, (0.0, 0.0), atol=1e-6)
        solved = solve_equilibrium(report.prices, params).shares
        self.assertLessEqual(solved.distance(report.shares), 1e-4)
        self.assertGreaterEqual(report.payoffs.u_licensee, 0.0)
        self.assertGreaterEqual(report.payoffs.u_database, 0.0)

    def test_defaults_wholesale(self):
        report = solve_stage2(Wholesale(0.5), ModelParams.defaults())
        self.assertTrue(report.converged)
        self.assertTrue(report.bounds_hold)
        np.testing.assert_allclose(report.foc_residuals, (0.0, 0.0), atol=1e-6)

    def test_zero_commissions_agree(self):
        params = ModelParams.defaults()
        rss = solve_stage2(RevenueShare(0.0), params, check_diagonal=False)
        wps = solve_stage2(Wholesale(0.0), params, check_diagonal=False)
        self.assertLessEqual(rss.shares.distance(wps.shares), 1e-9)

    def test_trace_starts_at_corner(self):
        report = solve_stage2(RevenueShare(0.3), ModelParams.defaults(), check_diagonal=False)
        self.assertEqual(report.trace[0].as_tuple(), (0.0, 1.0))
        self.assertEqual(report.trace[-1], report.shares)

    def test_round_limit(self):
        with self.assertRaises(ConvergenceError) as caught:
            solve_stage2(RevenueShare(0.3), ModelParams.defaults(), max_rounds=1, check_diagonal=False)
        self.assertEqual(caught.exception.rounds, 1)
        self.assertFalse(caught.exception.last.converged)


class CurvatureTests(SimpleTestCase):

    def test_constant_externalities_dominant_diagonal(self):
        for scheme in (RevenueShare(0.0), RevenueShare(0.6), Wholesale(0.5)):
            report = dominant_diagonal_check(scheme, constant_params(), 0.05)
            self.assertTrue(report.holds)
            self.assertAlmostEqual(report.licensee_margin, 9.0 * (1.0 - scheme.value if scheme.kind == 'rss' else 1.0),
                                   places=3)

    def test_supermodular_signs(self):
        for scheme in (RevenueShare(0.3), Wholesale(0.5)):
            self.assertTrue(supermodularity_check(scheme, ModelParams.defaults(), 0.05).holds)
