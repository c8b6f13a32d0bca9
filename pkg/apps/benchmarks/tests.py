import numpy as np
from django.test import SimpleTestCase

from bargaining.disagreement import disagreement_point
from competition.stage2 import solve_stage2, stage2_report
from market.params import MarketShare, ModelParams, RevenueShare, SensingParams, Wholesale

from .exceptions import SensingOrderError
from .schemes import coordination_optimum, pure_information_market, third_party_scheme
from .sensing import sensing_market_equilibrium, sensing_stage3, sensing_thresholds
from .welfare import energy_cost_comparison, report_from_stage2, social_welfare

FAST = {'points': 401}


def constant_params(**overrides):
    values = dict(alpha1=1.0, beta1=0.0, alpha2=1.0, beta2=1.0)
    values.update(overrides)
    return ModelParams.defaults(**values)


class CoordinationTests(SimpleTestCase):

    def test_constant_externalities(self):
        report = coordination_optimum(constant_params())
        self.assertAlmostEqual(report.shares.eta_l, 0.41, places=6)
        self.assertAlmostEqual(report.shares.eta_a, 0.0, places=6)
        self.assertAlmostEqual(report.network_profit, 0.8405, places=8)

    def test_unprofitable_leasing(self):
        report = coordination_optimum(ModelParams.defaults(cost_leasing=7.0), grid=201)
        self.assertAlmostEqual(report.shares.eta_l, 0.0, places=6)
        self.assertAlmostEqual(report.u_licensee, 0.0, places=6)

    def test_dominates_competition(self):
        params = ModelParams.defaults()
        coordination = coordination_optimum(params)
        for scheme in (RevenueShare(0.3), Wholesale(0.5)):
            stage2 = solve_stage2(scheme, params, check_diagonal=False, **FAST)
            self.assertGreaterEqual(coordination.network_profit, stage2.payoffs.network_profit - 1e-6)


class PureInformationTests(SimpleTestCase):

    def test_unit_information_gain(self):
        report = pure_information_market(ModelParams.defaults(beta2=1.0))
        self.assertAlmostEqual(report.shares.eta_a, 0.5, places=9)
        self.assertAlmostEqual(report.prices.p_a, 0.5, places=9)
        self.assertAlmostEqual(report.network_profit, 0.25, places=12)
        self.assertEqual(report.shares.eta_l, 0.0)

    def test_shares_disagreement_point(self):
        params = ModelParams.defaults()
        self.assertEqual(pure_information_market(params).u_database, disagreement_point(params).u_database)


class ThirdPartyTests(SimpleTestCase):

    def test_matches_zero_wholesale_price(self):
        params = ModelParams.defaults()
        report = third_party_scheme(params, check_diagonal=False, **FAST)
        wholesale = solve_stage2(Wholesale(0.0), params, check_diagonal=False, **FAST)
        self.assertEqual(report.shares, wholesale.shares)
        self.assertEqual(report.commission, 0.0)


class SensingTests(SimpleTestCase):

    def setUp(self):
        self.params = constant_params()
        self.sensing = SensingParams(g1=1.0, c_s=0.1)

    def test_constant_thresholds(self):
        shares = sensing_stage3(2.0, self.params, self.sensing)
        self.assertAlmostEqual(shares.eta_l, 0.525, places=9)
        self.assertAlmostEqual(shares.eta_a, 0.375, places=9)
        self.assertAlmostEqual(shares.eta_b, 0.1, places=9)
        np.testing.assert_allclose(sensing_thresholds(shares, 2.0, self.params, self.sensing),
                                   (0.4, 0.1, 0.475))

    def test_free_sensing_empties_basic_service(self):
        shares = sensing_stage3(2.0, self.params, SensingParams(g1=1.0, c_s=0.0))
        self.assertAlmostEqual(shares.eta_b, 0.0, places=9)

    def test_order_violation(self):
        with self.assertRaises(SensingOrderError):
            sensing_stage3(1.0, ModelParams.defaults(q_leasing=2.5), SensingParams(g1=2.0, c_s=0.2))

    def test_revenue_share_splits_evenly(self):
        report = sensing_market_equilibrium(ModelParams.defaults(), SensingParams.defaults(), 'rss',
                                            grid_steps=21, points=401)
        self.assertAlmostEqual(report.commission, 0.5, places=4)
        self.assertAlmostEqual(report.u_licensee, report.u_database, places=4)
        self.assertGreater(report.details['eta_s'], 0.0)

    def test_fixed_wholesale(self):
        report = sensing_market_equilibrium(ModelParams.defaults(), SensingParams.defaults(), Wholesale(0.5),
                                            points=401)
        self.assertAlmostEqual(report.u_database, 0.5 * report.shares.eta_l)

    def test_free_sensing_welfare_accounting(self):
        params = ModelParams.defaults(cost_advanced=0.1)
        free = sensing_market_equilibrium(params, SensingParams(g1=2.0, c_s=0.0), RevenueShare(0.5), points=2001)
        priced = sensing_market_equilibrium(params, SensingParams(g1=2.0, c_s=0.4), RevenueShare(0.5), points=2001)
        self.assertAlmostEqual(free.shares.eta_l, 0.36, delta=0.01)
        self.assertAlmostEqual(social_welfare(free), 1.903, delta=1e-2)
        self.assertAlmostEqual(social_welfare(free), free.u_licensee + free.u_database + free.consumer_surplus)
        self.assertLess(social_welfare(priced), social_welfare(free))


class WelfareTests(SimpleTestCase):

    def test_constant_externalities(self):
        params = constant_params()
        stage2 = stage2_report(RevenueShare(0.2), MarketShare(0.55, 0.25), params, check_diagonal=False)
        self.assertAlmostEqual(social_welfare(report_from_stage2('rss', stage2, params)), 2.03)

    def test_commission_neutral(self):
        params, shares = ModelParams.defaults(), MarketShare(0.35, 0.25)
        welfare = [
            social_welfare(report_from_stage2('x', stage2_report(scheme, shares, params, check_diagonal=False), params))
            for scheme in (RevenueShare(0.0), RevenueShare(0.7), Wholesale(1.0))
        ]
        np.testing.assert_allclose(welfare, welfare[0], atol=1e-12)

    def test_everyone_leasing_for_free(self):
        params = ModelParams.defaults(cost_advanced=0.0, cost_leasing=0.0)
        stage2 = stage2_report(RevenueShare(0.3), MarketShare(1.0, 0.0), params, check_diagonal=False)
        self.assertAlmostEqual(social_welfare(report_from_stage2('x', stage2, params)), 3.0)

    def test_energy_without_sensing_cost(self):
        params = ModelParams.defaults()
        sensing = SensingParams(g1=2.0, c_s=0.0)
        integrated = report_from_stage2('rss', solve_stage2(RevenueShare(0.3), params, check_diagonal=False,
                                                            **FAST), params)
        sensing_report = sensing_market_equilibrium(params, sensing, RevenueShare(0.5), points=401)
        e_integrated, e_sensing = energy_cost_comparison(integrated, sensing_report, params, sensing)
        self.assertEqual(e_sensing, 0.0)
        self.assertGreater(e_integrated, 0.0)
