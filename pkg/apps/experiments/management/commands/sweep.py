import logging

from experiments import observations
from experiments.management.base import MarketCommand
from experiments.sweep import SWEEP_PARAMETERS, SweepSpec, run_sweep

logger = logging.getLogger('experiments')


class Command(MarketCommand):
    help = 'Sweep lambda, the leasing cost or the sensing cost across schemes.'
    schema = 'sweep'

    def add_command_arguments(self, parser):
        parser.add_argument('--parameter', choices=SWEEP_PARAMETERS, required=True)
        parser.add_argument('--start', type=float, required=True)
        parser.add_argument('--stop', type=float, required=True)
        parser.add_argument('--step', type=float, required=True)
        parser.add_argument('--schemes', default='rss,wps',
                            help='Comma separated: rss, wps, coordination, pure_info, third_party, sensing.')
        parser.add_argument('--columns', help='Comma separated output columns.')
        parser.add_argument('--grid-steps', type=int)
        parser.add_argument('--points', type=int)
        parser.add_argument('--workers', type=int, default=1, help='Threads evaluating sweep rows.')
        parser.add_argument('--check', action='store_true',
                            help='Check the expected trends; exit 3 when one fails.')

    def run(self, params, sensing, **options):
        spec = SweepSpec(
            parameter=options['parameter'],
            start=options['start'],
            stop=options['stop'],
            step=options['step'],
            schemes=tuple(s.strip() for s in options['schemes'].split(',') if s.strip()),
            outputs=tuple(c.strip() for c in options['columns'].split(',')) if options['columns'] else None,
        )
        self.findings = []
        frame = run_sweep(spec, params, sensing, workers=options['workers'],
                          grid_steps=options['grid_steps'], points=options['points'])
        if options['check']:
            self.findings = self._findings(spec, frame)
        return frame

    def _findings(self, spec, frame):
        if spec.parameter == 'lambda':
            findings = observations.lambda_findings(frame)
        elif spec.parameter == 'cost_leasing':
            findings = observations.cost_leasing_findings(frame)
        else:
            findings = observations.cost_sensing_findings(frame)
        for finding in findings:
            log = logger.info if finding.holds else logger.warning
            log('%s: %s (%s)', finding.name, 'holds' if finding.holds else 'fails', finding.detail)
        return findings

    def failed(self, frame):
        return any(not finding.holds for finding in self.findings)
