from django.core.management.base import BaseCommand, CommandError

from ...conf import sic_setting
from ...files import render_json
from ...serializers import BasisReportSerializer
from ...wh_group import parse_error_basis, validate_error_basis
from ..options import EXIT_FAILURE, check_positive, read_bytes, usage_errors


class Command(BaseCommand):
    help = "Check that a JSON error basis is an orthogonal unitary basis and print the report"

    def add_arguments(self, parser):
        parser.add_argument('file', help="Error basis JSON file")
        parser.add_argument('--tol', type=float, help="Unitarity/orthogonality tolerance (default BASIS_TOL)")

    def handle(self, *args, **options):
        check_positive('tol', options['tol'])
        tol = options['tol'] if options['tol'] is not None else sic_setting('BASIS_TOL')
        with usage_errors():
            basis = parse_error_basis(read_bytes(options['file']))
            report = validate_error_basis(basis, tol)

        self.stdout.write(render_json(BasisReportSerializer(report).data).decode().rstrip())
        if not report.passed:
            raise CommandError(
                f"{options['file']} is not an orthogonal unitary basis "
                f"(unitarity={report.unitarity_deviation:.3e}, "
                f"orthogonality={report.orthogonality_deviation:.3e}, "
                f"identities={report.identity_count})",
                returncode=EXIT_FAILURE,
            )
