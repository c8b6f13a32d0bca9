from dataclasses import replace

import pandas as pd

from experiments.management.base import MarketCommand
from experiments.sweep import SWEEP_COLUMNS, SWEEP_SCHEMES, scheme_row

BENCHMARK_COLUMNS = tuple(c for c in SWEEP_COLUMNS if c not in ('parameter', 'value', 'error'))


class Command(MarketCommand):
    help = 'Both bargained schemes next to the coordination, pure information, third party and sensing markets.'
    schema = 'benchmarks'

    def add_command_arguments(self, parser):
        parser.add_argument('--sensing-g1', type=float, help='Constant gain of self-sensing.')
        parser.add_argument('--c-s', type=float, help='Sensing cost per user.')
        parser.add_argument('--grid-steps', type=int)
        parser.add_argument('--points', type=int)
        parser.add_argument('--workers', type=int, default=1)

    def run(self, params, sensing, **options):
        if options['sensing_g1'] is not None:
            sensing = replace(sensing, g1=options['sensing_g1'])
        if options['c_s'] is not None:
            sensing = replace(sensing, c_s=options['c_s'])
        rows = [
            scheme_row(scheme, params, sensing, grid_steps=options['grid_steps'],
                       points=options['points'], workers=options['workers'])
            for scheme in SWEEP_SCHEMES
        ]
        return pd.DataFrame(rows).reindex(columns=list(BENCHMARK_COLUMNS))
