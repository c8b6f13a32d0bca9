import logging

import numpy as np
import pandas as pd
from django.conf import settings

from experiments.management.base import MarketCommand
from validation.interference import InterferenceModel, basic_rate_curve, information_gain_curve
from validation.shapes import NOISE_MULTIPLE, shape_checks

logger = logging.getLogger('experiments')


class Command(MarketCommand):
    help = 'Sample basic and advanced rates from the interference model and check their shapes.'
    schema = 'mc_oracle'

    def add_command_arguments(self, parser):
        parser.add_argument('--channels', type=int, default=settings.TVWS['MC_CHANNELS'])
        parser.add_argument('--users', type=int, default=settings.TVWS['MC_USERS'])
        parser.add_argument('--samples', type=int, default=settings.TVWS['MC_SAMPLES'])
        parser.add_argument('--chunk', type=int, default=settings.TVWS['MC_CHUNK'])
        parser.add_argument('--points', type=int, default=9, help='Share grid points on the curve.')
        parser.add_argument('--curve', choices=('basic', 'gain'), default='gain')
        parser.add_argument('--eta-l', type=float, default=0.0, help='Leasing share held fixed on the gain curve.')
        parser.add_argument('--workers', type=int, default=1)

    def run(self, params, sensing, **options):
        model = InterferenceModel(
            k=options['channels'],
            n_users=options['users'],
            samples=options['samples'],
            chunk=options['chunk'],
            seed=settings.TVWS['SEED'] if options['seed'] is None else options['seed'],
        )
        if options['curve'] == 'basic':
            curve = basic_rate_curve(model, np.linspace(0.1, 1.0, options['points']), options['workers'])
            report = shape_checks(curve.shares, curve.values, curve.stderr, increasing=False, convex=None)
            negative = []
        else:
            upper = 0.9 * (1.0 - options['eta_l'])
            curve = information_gain_curve(model, options['eta_l'], np.linspace(0.1, upper, options['points']),
                                           options['workers'])
            report = shape_checks(curve.shares, curve.values, curve.stderr, increasing=None, convex=False)
            negative = np.flatnonzero(curve.values < -NOISE_MULTIPLE * curve.stderr).tolist()

        self.passed = report.holds and not negative
        if not self.passed:
            logger.warning('%s curve: monotone %s, curvature %s, negative %s', curve.label,
                           report.monotone_violations, report.curvature_violations, negative)
        return pd.DataFrame(curve.rows())

    def failed(self, frame):
        return not self.passed
