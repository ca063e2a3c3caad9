from django.core.management.base import BaseCommand, CommandError

from ...conf import sic_setting, tolerance_profile
from ...files import load_fiducial_file, render_json
from ...serializers import VerificationReportSerializer
from ...verification import verify_fiducial
from ..options import EXIT_FAILURE, EXIT_USAGE, certificate_line, check_positive, read_bytes, usage_errors


class Command(BaseCommand):
    help = (
        "Regenerate the orbit of a fiducial file and print its certificates as JSON. "
        "Exits 0 when the SIC certificate passes (or the -t design certificate, when given)."
    )

    def add_arguments(self, parser):
        parser.add_argument('file', help="Fiducial file")
        parser.add_argument('-t', type=int, help="Also certify a t-design of this order and gate on it")
        parser.add_argument('--tol', type=float, help="SIC overlap tolerance (default NUMERIC_TOL)")

    def handle(self, *args, **options):
        t = options['t']
        if t is not None and t < 1:
            raise CommandError(f"-t must be a positive integer, got {t}", returncode=EXIT_USAGE)
        check_positive('tol', options['tol'])
        tol = options['tol'] if options['tol'] is not None else tolerance_profile('numeric')

        with usage_errors():
            fiducial_file = load_fiducial_file(read_bytes(options['file']))
            report = verify_fiducial(
                fiducial_file.fiducial, fiducial_file.resolve_basis(),
                tol=tol, extra_t=t, rank_tol=sic_setting('GRAM_RANK_TOL'),
            )

        self.stdout.write(render_json(VerificationReportSerializer(report).data).decode().rstrip())
        for certificate in (*report.designs, report.sic):
            self.stderr.write(certificate_line(certificate))

        gate = report.design(t) if t is not None else report.sic
        if not gate.passed:
            detail = (f"max_overlap_error={gate.max_overlap_error:.3e}" if gate.max_overlap_error is not None
                      else f"deviation={gate.deviation:.3e}")
            raise CommandError(
                f"{options['file']}: certificate failed ({'SIC' if t is None else f't={t}'}, {detail}, "
                f"max_overlap_error={report.sic.max_overlap_error:.3e})",
                returncode=EXIT_FAILURE,
            )
