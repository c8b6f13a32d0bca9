import pandas as pd

from dynamics.certificate import uniqueness_certificate
from dynamics.equilibrium import best_response_map, iterate_dynamics, solve_equilibrium
from dynamics.exceptions import ConvergenceError
from dynamics.surplus import consumer_surplus
from experiments.management.base import MarketCommand
from market.params import MarketShare, PriceProfile
from market.utility import validate_params


class Command(MarketCommand):
    help = 'Stage III user equilibrium at fixed prices.'
    schema = 'equilibrium'

    def add_command_arguments(self, parser):
        parser.add_argument('--p-l', type=float, required=True, help='Leasing price.')
        parser.add_argument('--p-a', type=float, required=True, help='Advanced information price.')
        parser.add_argument('--trace', action='store_true', help='Emit the best-response trajectory from (0, 0).')

    def run(self, params, sensing, **options):
        validate_params(params)
        prices = PriceProfile(options['p_l'], options['p_a'])

        if options['trace']:
            self.schema = 'equilibrium_trace'
            trajectory = iterate_dynamics(MarketShare(0.0, 0.0), prices, params, tol=options['tol'])
            if not trajectory.converged:
                raise ConvergenceError(f'dynamics did not converge in {trajectory.iterations} steps',
                                       last=trajectory.terminal, rounds=trajectory.iterations)
            points = trajectory.points
            successors = points[1:] + [best_response_map(points[-1], prices, params)]
            return pd.DataFrame([
                {'iter': i, 'eta_l': p.eta_l, 'eta_a': p.eta_a, 'residual': p.distance(q)}
                for i, (p, q) in enumerate(zip(points, successors))
            ])

        solution = solve_equilibrium(prices, params, tol=options['tol'])
        certificate = uniqueness_certificate(prices, params)
        shares = solution.shares
        return pd.DataFrame([{
            'p_l': prices.p_l,
            'p_a': prices.p_a,
            'eta_l': shares.eta_l,
            'eta_a': shares.eta_a,
            'eta_b': shares.eta_b,
            'branch': solution.branch.value,
            'residual': solution.residual,
            'consumer_surplus': consumer_surplus(shares, prices, params),
            'certificate_holds': certificate.holds,
            'kappa': certificate.kappa,
        }])
