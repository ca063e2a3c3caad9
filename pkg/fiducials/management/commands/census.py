import logging

from django.core.management.base import BaseCommand, CommandError
from tqdm import tqdm

from ...census import census
from ...conf import resolve_workers, sic_setting
from ...files import render_json
from ...models import CensusRecord
from ...search import SearchConfig
from ...serializers import CensusSerializer
from ..options import EXIT_FAILURE, check_dimension, check_positive, check_seed, usage_errors

logger = logging.getLogger(__name__)


class Command(BaseCommand):
    help = (
        "Count the distinct SIC-POVMs produced by repeated searches in one dimension "
        "and print a summary table. Dimensions above 7 are slow."
    )

    def add_arguments(self, parser):
        parser.add_argument('-d', '--dimension', type=int, required=True, help="Hilbert space dimension")
        parser.add_argument('--runs', type=int, default=100, help="Number of independent searches")
        parser.add_argument('--seed', type=int, default=0, help="Master seed")
        parser.add_argument('--restarts-per-run', type=int, default=1, help="Multi-start restarts in each run")
        parser.add_argument('--tol', type=float, help="Orbit dedup tolerance (default DEDUP_TOL)")
        parser.add_argument('--out', help="Write the census JSON here")
        parser.add_argument('--workers', type=int, help="Worker processes (default SIC_THREADS or 1)")
        parser.add_argument('--save', action='store_true', help="Store the census in the catalog")
        parser.add_argument('--no-progress', action='store_true', help="Hide the progress bar")

    def handle(self, *args, **options):
        d = options['dimension']
        runs = options['runs']
        check_dimension(d)
        check_seed(options['seed'])
        for name in ('runs', 'restarts_per_run', 'tol', 'workers'):
            check_positive(name.replace('_', '-'), options[name])
        tol = options['tol'] if options['tol'] is not None else sic_setting('DEDUP_TOL')

        recommended = sic_setting('CENSUS_RECOMMENDED_MAX_DIMENSION')
        if d > recommended:
            logger.warning(f"Census above d={recommended} is slow and its count is unlikely to be exhaustive")
            self.stderr.write(self.style.WARNING(
                f"d={d} is above the recommended census range (d <= {recommended})"
            ))

        progress = tqdm(total=runs, desc=f"Census d={d}", unit="run",
                        disable=True if options['no_progress'] else None)

        def advance(run_index, outcome, partial):
            progress.update(1)
            progress.set_postfix(sics=partial.count)

        with usage_errors():
            template = SearchConfig.for_dimension(d, restarts=options['restarts_per_run'])
            try:
                result = census(
                    d, runs, options['seed'],
                    restarts_per_run=options['restarts_per_run'],
                    dedup_tol=tol,
                    template=template,
                    workers=resolve_workers(options['workers']),
                    callback=advance,
                    continuum_min_runs=sic_setting('CENSUS_CONTINUUM_MIN_RUNS'),
                    continuum_tail=sic_setting('CENSUS_CONTINUUM_TAIL'),
                    min_converged_fraction=sic_setting('CENSUS_MIN_CONVERGED_FRACTION'),
                )
            finally:
                progress.close()

        if options['out']:
            try:
                with open(options['out'], 'wb') as handle:
                    handle.write(render_json(CensusSerializer(result).data))
            except OSError as e:
                raise CommandError(f"Cannot write {options['out']}: {e.strerror}", returncode=EXIT_FAILURE) from e
        if options['save']:
            record = CensusRecord.from_census(result)
            logger.info(f"Stored census as record {record.id_census}")

        self.stdout.write(self.table(result))

    def table(self, result):
        notes = []
        if result.continuum_suspected:
            notes.append("continuum suspected")
        if result.low_confidence:
            notes.append("low confidence")
        separation = f"{result.min_separation:.2e}" if result.min_separation is not None else "-"
        header = f"{'d':>3}  {'runs':>6}  {'converged':>9}  {'SIC sets':>8}  {'min sep':>8}  note"
        row = (f"{result.d:>3}  {result.runs:>6}  {result.converged_runs:>9}  {result.count:>8}  "
               f"{separation:>8}  {', '.join(notes) or '-'}")
        return f"{header}\n{row}"
