import pandas as pd

from experiments.management.base import MarketCommand
from validation.suite import run_validation


class Command(MarketCommand):
    help = 'Cross-check the solvers against the agent, grid and sampling oracles.'
    schema = 'validate'

    def add_command_arguments(self, parser):
        parser.add_argument('--draws', type=int, default=200, help='Random prices for the fixed-point check.')
        parser.add_argument('--agents', type=int, default=20000, help='Population size of the agent oracle.')
        parser.add_argument('--agent-points', type=int, default=5)
        parser.add_argument('--resolution', type=float, default=1e-3, help='Grid oracle resolution.')
        parser.add_argument('--certificate-draws', type=int, default=20)
        parser.add_argument('--surplus-points', type=int, default=5)
        parser.add_argument('--surplus-samples', type=int)
        parser.add_argument('--points', type=int, help='Best-response grid points in Stage II.')
        parser.add_argument('--no-observations', action='store_true',
                            help='Skip the lambda, leasing-cost and sensing-cost sweeps.')
        parser.add_argument('--sweep-step', type=float, default=0.2)
        parser.add_argument('--grid-steps', type=int, help='Bargaining grid steps in the sweeps.')
        parser.add_argument('--workers', type=int, default=1, help='Threads evaluating sweep rows.')

    def run(self, params, sensing, **options):
        results = run_validation(
            params,
            seed=options['seed'],
            draws=options['draws'],
            agent_points=options['agent_points'],
            agents=options['agents'],
            resolution=options['resolution'],
            certificate_draws=options['certificate_draws'],
            surplus_points=options['surplus_points'],
            surplus_samples=options['surplus_samples'],
            points=options['points'],
            sensing=sensing,
            with_observations=not options['no_observations'],
            sweep_step=options['sweep_step'],
            grid_steps=options['grid_steps'],
            workers=options['workers'],
        )
        return pd.DataFrame([result.as_row() for result in results])

    def failed(self, frame):
        return not bool(frame['passed'].all())
