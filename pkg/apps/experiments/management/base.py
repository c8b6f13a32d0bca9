import logging

from django.core.exceptions import ValidationError
from django.core.management.base import BaseCommand, CommandError

from dynamics.exceptions import ConvergenceError, NoSignChangeError
from experiments.csvio import render_csv, write_csv
from market.exceptions import MarketError
from market.forms import load_params_file

logger = logging.getLogger('experiments')

USAGE_ERROR = 1
NON_CONVERGENCE = 2
VALIDATION_FAILURE = 3


class MarketCommand(BaseCommand):
    """
    Shared flags, config loading, CSV output and exit codes for the market
    commands. Subclasses implement `run` returning a DataFrame.
    """

    schema = None

    def create_parser(self, prog_name, subcommand, **kwargs):
        parser = super().create_parser(prog_name, subcommand, **kwargs)
        if getattr(self, '_called_from_command_line', False):
            def usage_error(message):
                parser.print_usage()
                parser.exit(USAGE_ERROR, f'{parser.prog}: error: {message}\n')

            parser.error = usage_error
        return parser

    def add_arguments(self, parser):
        parser.add_argument('--config', help='TOML or JSON file with market parameters.')
        parser.add_argument('--out', default='-', help='CSV output path; "-" writes to stdout.')
        parser.add_argument('--tol', type=float, help='Solver tolerance override.')
        parser.add_argument('--seed', type=int, help='Random seed for sampled checks.')
        self.add_command_arguments(parser)

    def add_command_arguments(self, parser):
        pass

    def run(self, params, sensing, **options):
        raise NotImplementedError

    def failed(self, frame):
        return False

    def handle(self, *args, **options):
        try:
            params, sensing = load_params_file(options.get('config'))
        except ValidationError as exc:
            raise CommandError(f'Invalid config: {"; ".join(exc.messages)}', returncode=USAGE_ERROR) from exc

        try:
            frame = self.run(params, sensing, **options)
        except (ConvergenceError, NoSignChangeError) as exc:
            notes = ' '.join(getattr(exc, '__notes__', []))
            raise CommandError(f'{exc} {notes}'.strip(), returncode=NON_CONVERGENCE) from exc
        except MarketError as exc:
            raise CommandError(str(exc), returncode=USAGE_ERROR) from exc

        self.emit(frame, options.get('out', '-'))
        if self.failed(frame):
            raise CommandError(f'{self.schema}: validation failed', returncode=VALIDATION_FAILURE)

    def emit(self, frame, out):
        if out in (None, '-'):
            self.stdout.write(render_csv(frame, self.schema), ending='')
        else:
            write_csv(frame, self.schema, out)
            logger.info('wrote %d rows to %s', len(frame), out)
