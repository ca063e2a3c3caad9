import logging

from django.core.management.base import BaseCommand, CommandError

from ...conf import resolve_workers, sic_setting
from ...files import fiducial_file_for, render_json, write_fiducial_file
from ...models import StoredFiducial
from ...search import SearchConfig, multi_start
from ...serializers import RestartRecordSerializer, SearchResultSerializer, VerificationReportSerializer
from ...verification import verify_fiducial
from ...wh_group import load_error_basis
from ..options import (
    EXIT_FAILURE, certificate_line, check_dimension, check_positive, check_seed, read_bytes,
    usage_errors,
)

logger = logging.getLogger(__name__)


class Command(BaseCommand):
    help = (
        "Search numerically for a SIC fiducial by multi-start conjugate gradient. "
        "Streams one JSON line per restart and writes the best fiducial to a file."
    )

    def add_arguments(self, parser):
        parser.add_argument('-d', '--dimension', type=int, required=True, help="Hilbert space dimension")
        parser.add_argument('--runs', type=int, help="Number of restarts (default 32*d)")
        parser.add_argument('--seed', type=int, default=0, help="Master seed for all restarts")
        parser.add_argument('--tol', type=float, help="SIC overlap tolerance for convergence")
        parser.add_argument('--max-iterations', type=int, help="Iteration cap per restart")
        parser.add_argument('--out', help="Output file (default sic_d<d>_seed<seed>.json)")
        parser.add_argument('--basis-file', help="Search against this error basis instead of Weyl-Heisenberg")
        parser.add_argument('--workers', type=int, help="Worker processes (default SIC_THREADS or 1)")
        parser.add_argument('--first', action='store_true', help="Stop at the first converged restart")
        parser.add_argument('--save', action='store_true', help="Store the result in the catalog")

    def handle(self, *args, **options):
        d = options['dimension']
        seed = options['seed']
        check_dimension(d)
        check_seed(seed)
        for name in ('runs', 'tol', 'max_iterations', 'workers'):
            check_positive(name.replace('_', '-'), options[name])

        basis = None
        with usage_errors():
            if options['basis_file']:
                basis = load_error_basis(read_bytes(options['basis_file']), tol=sic_setting('BASIS_TOL'))
            config = SearchConfig.for_dimension(
                d, basis=basis,
                restarts=options['runs'],
                sic_tol=options['tol'],
                max_iterations=options['max_iterations'],
                rng_seed=seed,
                stop_on_success=options['first'],
            )

        def stream(result):
            self.stdout.write(render_json(RestartRecordSerializer(result).data, indent=None).decode().rstrip())

        outcome = multi_start(config, workers=resolve_workers(options['workers']), callback=stream)
        best = outcome.best

        report = verify_fiducial(best.fiducial, config.basis, tol=config.sic_tol)
        self.stdout.write(render_json({
            'best': SearchResultSerializer(best).data,
            'converged': best.converged,
            'success_fraction': outcome.success_fraction,
            'certificates': VerificationReportSerializer(report).data,
        }, indent=None).decode().rstrip())

        fiducial_file = fiducial_file_for(best.fiducial, basis, method='search', seed=best.seed)
        out = options['out'] or f"sic_d{d}_seed{seed}.json"
        try:
            write_fiducial_file(fiducial_file, out)
        except OSError as e:
            raise CommandError(f"Cannot write {out}: {e.strerror}", returncode=EXIT_FAILURE) from e
        if options['save']:
            stored = StoredFiducial.from_fiducial_file(fiducial_file, converged=best.converged)
            logger.info(f"Stored search result as fiducial {stored.id_fiducial}")

        for certificate in (*report.designs, report.sic):
            self.stderr.write(certificate_line(certificate))
        if not best.converged:
            raise CommandError(
                f"No restart converged in d={d}: best sic_deviation={best.sic_deviation:.3e} "
                f"after {len(outcome.results)} restarts (written to {out})",
                returncode=EXIT_FAILURE,
            )
        self.stderr.write(self.style.SUCCESS(
            f"d={d}: converged fiducial written to {out} (sic_deviation={best.sic_deviation:.3e})"
        ))
