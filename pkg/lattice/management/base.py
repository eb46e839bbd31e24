import json
import logging
from pathlib import Path

from django.core.management.base import BaseCommand, CommandError

from lattice.exceptions import LatticeError
from lattice.experiments import run
from lattice.serializers import ExperimentConfigSerializer
from lattice.utils import flatten_errors

logger = logging.getLogger(__name__)

CONFIG_ERROR = 2


class ExperimentCommand(BaseCommand):
    """Shared options and error mapping of the experiment subcommands.

    Exit codes: 0 ok, 2 invalid config or input, 3 consistency failure,
    4 non-convergence.
    """
    experiment = None
    requires_system_checks = []

    def add_arguments(self, parser):
        parser.add_argument('--config', help='JSON experiment config')
        parser.add_argument('--out', help='Output directory')
        parser.add_argument('--k1', type=float)
        parser.add_argument('--k2', type=float)
        parser.add_argument('--K', dest='K', type=int)
        parser.add_argument('--seed', type=int)

    def load_config(self, path):
        if not path:
            return {}
        path = Path(path)
        try:
            text = path.read_text(encoding='utf-8')
        except OSError as exc:
            raise CommandError(f'Cannot read config {path}: {exc.strerror}',
                               returncode=CONFIG_ERROR)
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise CommandError(
                f'{path}: invalid JSON at line {exc.lineno} column '
                f'{exc.colno}: {exc.msg}', returncode=CONFIG_ERROR
            )
        if not isinstance(data, dict):
            raise CommandError(f'{path}: config must be a JSON object',
                               returncode=CONFIG_ERROR)
        return data

    def merge_flags(self, data, options):
        """Command-line flags take precedence over file values."""
        family = dict(data.get('family') or {})
        for key in ('k1', 'k2', 'K'):
            if options.get(key) is not None:
                family[key] = options[key]
        if family:
            data['family'] = family
        if options.get('out'):
            data['output_dir'] = options['out']
        if options.get('seed') is not None:
            data['seed'] = options['seed']
        configured = data.get('experiment')
        if configured and configured != self.experiment:
            logger.warning('Config names experiment %s, running %s',
                           configured, self.experiment)
        data['experiment'] = self.experiment
        return data

    def handle(self, *args, **options):
        data = self.merge_flags(self.load_config(options.get('config')),
                                options)
        serializer = ExperimentConfigSerializer(data=data)
        if not serializer.is_valid():
            raise CommandError('\n'.join(flatten_errors(serializer.errors)),
                               returncode=CONFIG_ERROR)
        config = serializer.save()

        try:
            result = run(config)
        except LatticeError as exc:
            raise CommandError(str(exc), returncode=exc.exit_code)

        self.describe(result)
        for path in result.paths:
            self.stdout.write(self.style.SUCCESS(f'Wrote {path}'))

    def describe(self, result):
        summary = result.summary
        model = summary['model']
        self.stdout.write(
            f"gamma={model['gamma']:.12g} alpha={model['alpha']:.12g} "
            f"beta={summary['beta']['beta']:.12g}"
        )
