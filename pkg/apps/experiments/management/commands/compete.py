import pandas as pd

from competition.stage2 import solve_stage2
from experiments.management.base import MarketCommand
from market.params import parse_scheme


class Command(MarketCommand):
    help = 'Stage II market share equilibrium at a fixed commission.'
    schema = 'compete'

    def add_command_arguments(self, parser):
        parser.add_argument('--scheme', required=True, help="'rss:<delta>' or 'wps:<w>'.")
        parser.add_argument('--points', type=int, help='Best-response grid points.')
        parser.add_argument('--trace', action='store_true', help='Emit every best-response round.')

    def run(self, params, sensing, **options):
        scheme = parse_scheme(options['scheme'])
        report = solve_stage2(scheme, params, tol=options['tol'], points=options['points'])

        if options['trace']:
            self.schema = 'compete_trace'
            return pd.DataFrame(
                [{'round': i, 'eta_l': s.eta_l, 'eta_a': s.eta_a} for i, s in enumerate(report.trace)]
            )

        return pd.DataFrame([{
            'scheme': scheme.kind,
            'delta_or_w': scheme.value,
            'eta_l': report.shares.eta_l,
            'eta_a': report.shares.eta_a,
            'p_l': report.prices.p_l,
            'p_a': report.prices.p_a,
            'u_sl': report.payoffs.u_licensee,
            'u_db': report.payoffs.u_database,
            'network_profit': report.payoffs.network_profit,
            'rounds': report.rounds,
            'converged': report.converged,
            'foc_licensee': report.foc_residuals[0],
            'foc_database': report.foc_residuals[1],
            'dominant_diagonal': report.dominant_diagonal_holds,
            'bounds_hold': report.bounds_hold,
            'oscillation': report.oscillation_detected,
        }])
