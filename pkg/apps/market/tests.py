import numpy as np
from django.core.exceptions import ValidationError
from django.test import SimpleTestCase

from .exceptions import AssumptionError, DomainError
from .forms import parse_params
from .params import (
    MarketShare, ModelParams, PriceProfile, RevenueShare, ServiceChoice,
    Wholesale, check_scheme, parse_scheme,
)
from .search import grid_maximize
from .utility import (
    ExternalityRegime, congestion_utility, externality_dominance, info_gain,
    info_gain_derivative, service_utilities, user_payoff, validate_params,
)


def constant_params(**overrides):
    """f == 1 and g == 1: no externalities at all."""
    values = dict(alpha1=1.0, beta1=0.0, alpha2=1.0, beta2=1.0)
    values.update(overrides)
    return ModelParams.defaults(**values)


class ParamsTests(SimpleTestCase):

    def test_defaults_and_lambda(self):
        params = ModelParams.defaults()
        self.assertAlmostEqual(params.lam, 1.8)
        self.assertAlmostEqual(params.with_lambda(0.4).beta2, 0.4)
        self.assertEqual(params.with_lambda(0.4).alpha2, params.alpha2)

    def test_gamma_out_of_range(self):
        with self.assertRaises(DomainError):
            ModelParams.defaults(gamma1=0.0)
        with self.assertRaises(DomainError):
            ModelParams.defaults(gamma2=1.5)

    def test_lambda_undefined_without_congestion(self):
        with self.assertRaises(DomainError):
            constant_params().lam

    def test_share_outside_simplex(self):
        with self.assertRaises(DomainError):
            MarketShare(0.7, 0.4)
        self.assertAlmostEqual(MarketShare(0.55, 0.25).eta_b, 0.2)

    def test_clipped_share(self):
        share = MarketShare.clipped(0.8, 0.5)
        self.assertEqual(share.as_tuple(), (0.8, share.eta_a))
        self.assertAlmostEqual(share.eta_a, 0.2)

    def test_negative_price_rejected(self):
        with self.assertRaises(DomainError):
            PriceProfile(-1.0, 0.2)

    def test_schemes(self):
        self.assertEqual(parse_scheme('rss:0.3'), RevenueShare(0.3))
        self.assertEqual(parse_scheme('WPS:0.5'), Wholesale(0.5))
        with self.assertRaises(DomainError):
            parse_scheme('rss:1.2')
        with self.assertRaises(DomainError):
            parse_scheme('fixed:1')
        with self.assertRaises(DomainError):
            check_scheme(Wholesale(7.0), ModelParams.defaults())


class UtilityTests(SimpleTestCase):

    def setUp(self):
        self.params = ModelParams.defaults()

    def test_congestion_endpoints(self):
        self.assertEqual(congestion_utility(0.0, self.params), 1.0)
        self.assertAlmostEqual(congestion_utility(1.0, self.params), 0.0)
        self.assertAlmostEqual(congestion_utility(0.39445, self.params), 0.4278, places=3)

    def test_congestion_domain(self):
        with self.assertRaises(DomainError):
            congestion_utility(1.5, self.params)

    def test_congestion_shape(self):
        values = congestion_utility(np.linspace(0, 1, 201), self.params)
        self.assertTrue(np.all(np.diff(values) <= 1e-15))
        self.assertTrue(np.all(np.diff(values, 2) >= -1e-12))

    def test_info_gain(self):
        self.assertEqual(info_gain(0.0, self.params), 1.0)
        self.assertAlmostEqual(info_gain(1.0, self.params), 1.8)
        self.assertAlmostEqual(info_gain(0.157, self.params), 1.2634, places=4)
        values = info_gain(np.linspace(0, 1, 201), self.params)
        self.assertTrue(np.all(np.diff(values) >= 0))
        self.assertTrue(np.all(np.diff(values, 2) <= 1e-12))

    def test_info_gain_derivative(self):
        self.assertTrue(np.isinf(info_gain_derivative(0.0, self.params)))
        self.assertAlmostEqual(info_gain_derivative(1.0, self.params), 0.6 * 0.8)
        self.assertEqual(info_gain_derivative(0.0, constant_params()), 0.0)

    def test_service_utilities_constant(self):
        utilities = service_utilities(MarketShare(0.3, 0.3), constant_params())
        self.assertEqual(utilities.as_tuple(), (1.0, 2.0, 6.0))
        self.assertTrue(utilities.ordered)

    def test_service_utilities_defaults(self):
        shares = MarketShare(0.6056, 0.1571)
        utilities = service_utilities(shares, self.params)
        self.assertAlmostEqual(utilities.r_basic, 0.4278, places=3)
        self.assertAlmostEqual(utilities.r_advanced, 1.6912, places=3)
        self.assertAlmostEqual(utilities.r_advanced - utilities.r_basic,
                               info_gain(shares.eta_a, self.params), places=12)

    def test_ordering_flag(self):
        utilities = service_utilities(MarketShare(1.0, 0.0), self.params.replace(q_leasing=2.0))
        self.assertFalse(utilities.ordered)

    def test_user_payoff(self):
        shares, prices = MarketShare(0.6056, 0.1571), PriceProfile(2.0, 0.3)
        self.assertEqual(user_payoff(0.0, ServiceChoice.BASIC, shares, prices, self.params), 0.0)
        self.assertAlmostEqual(user_payoff(0.5, ServiceChoice.LEASING, shares, prices, self.params), 1.0)
        self.assertAlmostEqual(user_payoff(0.4, ServiceChoice.ADVANCED, shares, prices, self.params),
                               0.3765, places=2)

    def test_user_payoff_affine_in_theta(self):
        shares, prices = MarketShare(0.2, 0.3), PriceProfile(2.0, 0.3)
        for choice in (ServiceChoice.BASIC, ServiceChoice.ADVANCED, ServiceChoice.LEASING):
            values = [user_payoff(t, choice, shares, prices, self.params) for t in (0.0, 0.5, 1.0)]
            self.assertAlmostEqual(values[1], (values[0] + values[2]) / 2)


class AssumptionTests(SimpleTestCase):

    def test_defaults_pass(self):
        self.assertTrue(validate_params(ModelParams.defaults()).all_passed)

    def test_negative_dominant_regime_flagged(self):
        with self.assertLogs('market.utility', level='WARNING'):
            report = validate_params(ModelParams.defaults().with_lambda(0.4))
        self.assertFalse(report['information'].passed)
        self.assertIn('monotonicity of g', report['information'].note)
        self.assertTrue(report['separation'].passed)

    def test_zero_information_gain_is_fatal(self):
        with self.assertRaises(AssumptionError):
            validate_params(ModelParams.defaults(alpha2=0.0))


class DominanceTests(SimpleTestCase):

    def test_positive_when_information_outweighs(self):
        params = ModelParams.defaults(beta2=2.0)
        report = externality_dominance(params, MarketShare(0.5, 0.5))
        self.assertEqual(report.regime, ExternalityRegime.POSITIVE_DOMINANT)

    def test_negative_at_low_lambda(self):
        params = ModelParams.defaults().with_lambda(0.4)
        report = externality_dominance(params, MarketShare(0.0, 0.3))
        self.assertEqual(report.regime, ExternalityRegime.NEGATIVE_DOMINANT)

    def test_neutral_at_threshold(self):
        shares = MarketShare(0.2, 0.3)
        threshold = (0.3 / 0.8) ** 0.4
        report = externality_dominance(ModelParams.defaults().with_lambda(threshold), shares)
        self.assertEqual(report.regime, ExternalityRegime.NEUTRAL)
        self.assertAlmostEqual(report.threshold, threshold)

    def test_analytic_form_shifts_threshold(self):
        shares = MarketShare(0.2, 0.3)
        printed = externality_dominance(ModelParams.defaults(), shares)
        analytic = externality_dominance(ModelParams.defaults(), shares, form='analytic')
        self.assertAlmostEqual(analytic.threshold, printed.threshold + 1.0)
        self.assertLess(analytic.indicator, printed.indicator)
        at_threshold = ModelParams.defaults().with_lambda(analytic.threshold)
        self.assertEqual(externality_dominance(at_threshold, shares, form='analytic').regime,
                         ExternalityRegime.NEUTRAL)

    def test_unbounded_without_advanced_users(self):
        with self.assertRaises(DomainError):
            externality_dominance(ModelParams.defaults(), MarketShare(0.5, 0.0))


class ConfigFormTests(SimpleTestCase):

    def test_empty_config_gives_defaults(self):
        params, sensing = parse_params({})
        self.assertEqual(params, ModelParams.defaults())
        self.assertEqual(sensing.g1, 2.0)

    def test_lambda_key(self):
        params, _ = parse_params({'lambda': 0.4})
        self.assertAlmostEqual(params.beta2, 0.4)

    def test_sensing_table(self):
        _, sensing = parse_params({'sensing': {'gain': 1.5, 'cost': 0.1}})
        self.assertEqual((sensing.g1, sensing.c_s), (1.5, 0.1))

    def test_unknown_key_rejected(self):
        with self.assertRaises(ValidationError):
            parse_params({'q_licensed': 6})

    def test_bad_gamma_rejected(self):
        with self.assertRaises(ValidationError):
            parse_params({'gamma1': 1.5})

    def test_separation_breach_is_flagged_not_rejected(self):
        params, _ = parse_params({'q_leasing': 2.0})
        self.assertEqual(params.q_leasing, 2.0)
        with self.assertLogs('market.utility', level='WARNING'):
            report = validate_params(params)
        self.assertFalse(report['separation'].passed)
        self.assertAlmostEqual(report['separation'].witness, -0.8)

    def test_non_positive_gain_rejected(self):
        with self.assertRaises(ValidationError):
            parse_params({'alpha2': 0.0})


class SearchTests(SimpleTestCase):

    def test_interior_vertex(self):
        result = grid_maximize(lambda x: -(x - 0.3137) ** 2, 0.0, 1.0, 101)
        self.assertAlmostEqual(result.x, 0.3137, places=8)

    def test_endpoint_maximum(self):
        result = grid_maximize(lambda x: x, 0.0, 2.0, 11)
        self.assertAlmostEqual(result.x, 2.0, places=8)

    def test_degenerate_interval(self):
        result = grid_maximize(lambda x: -x, 0.5, 0.5, 11)
        self.assertEqual(result.x, 0.5)

    def test_infeasible_points_skipped(self):
        result = grid_maximize(
            lambda x: float('-inf') if x < 0.5 else 1.0 - x,
            0.0, 1.0, 11, vectorized=False,
        )
        self.assertAlmostEqual(result.x, 0.5, places=8)
