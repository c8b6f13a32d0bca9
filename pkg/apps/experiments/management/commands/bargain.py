import pandas as pd

from bargaining.nash import PAIRINGS
from experiments.management.base import MarketCommand
from experiments.pipeline import run_three_stage
from market.params import SCHEME_KINDS


class Command(MarketCommand):
    help = 'Bargained commission and the three-stage equilibrium it leads to.'
    schema = 'bargain'

    def add_command_arguments(self, parser):
        parser.add_argument('--scheme', choices=SCHEME_KINDS, required=True)
        parser.add_argument('--grid-steps', type=int, help='Commission grid size before refinement.')
        parser.add_argument('--pairing', choices=PAIRINGS, help='How disagreement payoffs pair with the firms.')
        parser.add_argument('--points', type=int, help='Best-response grid points in Stage II.')
        parser.add_argument('--workers', type=int, default=1, help='Threads evaluating the commission grid.')

    def run(self, params, sensing, **options):
        stage2_options = {'tol': options['tol']}
        if options['points']:
            stage2_options['points'] = options['points']
        report = run_three_stage(
            options['scheme'], params, grid_steps=options['grid_steps'], pairing=options['pairing'],
            workers=options['workers'], **stage2_options,
        )
        row = report.as_row()
        row['disagreement_u_db'] = report.bargaining.disagreement.u_database
        return pd.DataFrame([row])
