import numpy as np
from django.test import SimpleTestCase

from market.exceptions import DegenerateDenominatorError
from market.params import MarketShare, ModelParams, PriceProfile

from .certificate import uniqueness_certificate
from .equilibrium import (
    Branch, best_response_map, iterate_dynamics, multi_start_spread,
    solve_equilibrium, thresholds,
)
from .exceptions import ThresholdOrderError
from .surplus import consumer_surplus, sampled_surplus


def constant_params(**overrides):
    values = dict(alpha1=1.0, beta1=0.0, alpha2=1.0, beta2=1.0)
    values.update(overrides)
    return ModelParams.defaults(**values)


class ThresholdTests(SimpleTestCase):

    def test_constant_externalities(self):
        t = thresholds(MarketShare(0.3, 0.3), PriceProfile(2.0, 0.2), constant_params())
        np.testing.assert_allclose(t.as_tuple(), (0.4, 0.2, 0.45))

    def test_free_services(self):
        t = thresholds(MarketShare(0.3, 0.3), PriceProfile(0.0, 0.0), ModelParams.defaults())
        self.assertEqual(t.as_tuple(), (0.0, 0.0, 0.0))

    def test_defaults(self):
        t = thresholds(MarketShare(0.6056, 0.1571), PriceProfile(2.0, 0.3), ModelParams.defaults())
        self.assertAlmostEqual(t.theta_lb, 0.3589, places=3)
        self.assertAlmostEqual(t.theta_ab, 0.2374, places=3)
        self.assertAlmostEqual(t.theta_la, 0.3945, places=3)
        self.assertGreater(t.theta_la, t.theta_lb)
        self.assertGreater(t.theta_lb, t.theta_ab)

    def test_degenerate_denominator(self):
        params = ModelParams.defaults(q_leasing=2.0)
        with self.assertRaises(DegenerateDenominatorError):
            thresholds(MarketShare(1.0, 0.0), PriceProfile(1.0, 0.1), params)

    def test_branch_ordering_on_grid(self):
        params, prices = ModelParams.defaults(), PriceProfile(2.0, 0.3)
        for eta_l in np.linspace(0, 0.9, 10):
            for eta_a in np.linspace(0, 1 - eta_l, 7):
                t = thresholds(MarketShare(eta_l, eta_a), prices, params)
                if t.theta_lb > t.theta_ab:
                    self.assertGreater(t.theta_la, t.theta_lb)
                elif t.theta_lb < t.theta_ab:
                    self.assertLess(t.theta_la, t.theta_lb)


class BestResponseMapTests(SimpleTestCase):

    def test_free_leasing(self):
        mapped = best_response_map(MarketShare(0.2, 0.4), PriceProfile(0.0, 0.5), ModelParams.defaults())
        self.assertEqual(mapped.as_tuple(), (1.0, 0.0))

    def test_constant_map(self):
        params, prices = constant_params(), PriceProfile(2.0, 0.2)
        for shares in (MarketShare(0, 0), MarketShare(0, 1), MarketShare(0.7, 0.1)):
            mapped = best_response_map(shares, prices, params)
            self.assertAlmostEqual(mapped.eta_l, 0.55)
            self.assertAlmostEqual(mapped.eta_a, 0.25)

    def test_expensive_information(self):
        mapped = best_response_map(MarketShare(0.3, 0.3), PriceProfile(2.0, 1.5), constant_params())
        self.assertEqual(mapped.eta_a, 0.0)
        self.assertAlmostEqual(mapped.eta_l, 0.6)


class DynamicsTests(SimpleTestCase):

    def test_constant_converges_immediately(self):
        trajectory = iterate_dynamics(MarketShare(0.0, 1.0), PriceProfile(2.0, 0.2), constant_params())
        self.assertTrue(trajectory.converged)
        self.assertLessEqual(trajectory.iterations, 2)
        self.assertAlmostEqual(trajectory.terminal.eta_l, 0.55)
        self.assertAlmostEqual(trajectory.terminal.eta_a, 0.25)

    def test_defaults_match_bisection(self):
        params, prices = ModelParams.defaults(), PriceProfile(2.0, 0.3)
        trajectory = iterate_dynamics(MarketShare(0.0, 0.0), prices, params, tol=1e-10)
        solution = solve_equilibrium(prices, params)
        self.assertTrue(trajectory.converged)
        self.assertLessEqual(trajectory.terminal.distance(solution.shares), 1e-6)
        for point in trajectory.points:
            self.assertLessEqual(point.eta_l + point.eta_a, 1.0 + 1e-12)

    def test_stops_at_max_iter(self):
        trajectory = iterate_dynamics(MarketShare(0.0, 0.0), PriceProfile(2.0, 0.3),
                                      ModelParams.defaults(), tol=1e-15, max_iter=3)
        self.assertFalse(trajectory.converged)
        self.assertEqual(trajectory.iterations, 3)
        self.assertEqual(len(trajectory.points), 4)


class SolveEquilibriumTests(SimpleTestCase):

    def test_constant_active(self):
        shares, branch, _ = solve_equilibrium(PriceProfile(2.0, 0.2), constant_params())
        self.assertEqual(branch, Branch.ADVANCED_ACTIVE)
        self.assertAlmostEqual(shares.eta_l, 0.55, places=10)
        self.assertAlmostEqual(shares.eta_a, 0.25, places=10)

    def test_constant_empty(self):
        shares, branch, _ = solve_equilibrium(PriceProfile(2.0, 1.2), constant_params())
        self.assertEqual(branch, Branch.ADVANCED_EMPTY)
        self.assertAlmostEqual(shares.eta_l, 0.6, places=10)
        self.assertEqual(shares.eta_a, 0.0)

    def test_defaults(self):
        shares, branch, residual = solve_equilibrium(PriceProfile(2.0, 0.3), ModelParams.defaults(), tol=1e-12)
        self.assertEqual(branch, Branch.ADVANCED_ACTIVE)
        self.assertAlmostEqual(shares.eta_l, 0.6056, places=3)
        self.assertAlmostEqual(shares.eta_a, 0.1571, places=3)
        self.assertLess(residual, 1e-10)

    def test_fixed_point_property(self):
        rng = np.random.default_rng(7)
        params = ModelParams.defaults()
        for p_l, p_a in rng.uniform((0.0, 0.0), (4.5, 1.5), size=(50, 2)):
            prices = PriceProfile(p_l, p_a)
            shares = solve_equilibrium(prices, params).shares
            self.assertLessEqual(best_response_map(shares, prices, params).distance(shares), 1e-8)

    def test_leasing_share_falls_with_leasing_price(self):
        params = ModelParams.defaults()
        shares = [solve_equilibrium(PriceProfile(p_l, 0.3), params).shares.eta_l
                  for p_l in np.arange(0.5, 4.01, 0.25)]
        self.assertTrue(np.all(np.diff(shares) <= 1e-9))

    def test_everyone_leases_when_free(self):
        shares, branch, _ = solve_equilibrium(PriceProfile(0.0, 0.0), ModelParams.defaults())
        self.assertEqual(branch, Branch.ADVANCED_EMPTY)
        self.assertAlmostEqual(shares.eta_l, 1.0)


class CertificateTests(SimpleTestCase):

    def test_constant_information_gain(self):
        certificate = uniqueness_certificate(PriceProfile(2.0, 0.3), ModelParams.defaults(beta2=1.0), 1e-2)
        self.assertEqual(certificate.lhs_max, 0.0)
        self.assertTrue(certificate.holds)

    def test_zero_prices(self):
        certificate = uniqueness_certificate(PriceProfile(0.0, 0.0), ModelParams.defaults(), 1e-2)
        self.assertEqual(certificate.kappa, 0.0)
        self.assertTrue(certificate.holds)

    def test_certificate_implies_agreement(self):
        params, prices = ModelParams.defaults(gamma2=1.0), PriceProfile(2.0, 0.3)
        certificate = uniqueness_certificate(prices, params, 1e-2)
        self.assertTrue(certificate.holds)
        spread, converged = multi_start_spread(prices, params, starts=10, seed=3)
        self.assertTrue(converged)
        self.assertLessEqual(spread, 1e-6)

    def test_defaults_recorded(self):
        certificate = uniqueness_certificate(PriceProfile(2.0, 0.3), ModelParams.defaults(), 1e-2)
        self.assertGreater(certificate.kappa, 0.0)
        self.assertTrue(np.isfinite(certificate.lhs_max))
        self.assertEqual(certificate.grid_resolution, 1e-2)


class ConsumerSurplusTests(SimpleTestCase):

    def test_constant_externalities(self):
        surplus = consumer_surplus(MarketShare(0.55, 0.25), PriceProfile(2.0, 0.2), constant_params())
        self.assertAlmostEqual(surplus, 1.425)

    def test_free_leasing(self):
        surplus = consumer_surplus(MarketShare(1.0, 0.0), PriceProfile(0.0, 0.0), ModelParams.defaults())
        self.assertAlmostEqual(surplus, 3.0)

    def test_matches_sampling(self):
        params, prices = ModelParams.defaults(), PriceProfile(2.0, 0.3)
        shares = solve_equilibrium(prices, params).shares
        mean, stderr = sampled_surplus(shares, prices, params, samples=1_000_000, seed=11)
        self.assertLessEqual(abs(consumer_surplus(shares, prices, params) - mean), max(1e-3, 4 * stderr))

    def test_inconsistent_branch(self):
        with self.assertRaises(ThresholdOrderError):
            consumer_surplus(MarketShare(0.55, 0.25), PriceProfile(2.0, 1.5), constant_params())
