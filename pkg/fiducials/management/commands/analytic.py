import logging
import os

from django.core.management.base import BaseCommand, CommandError

from ...analytic import (
    D3Params, D4Params, d3_boundary_family, d3_family, d4_family, fiducial_d2, fiducial_d3, fiducial_d4,
)
from ...census import fold_fiducials
from ...conf import sic_setting, tolerance_profile
from ...files import fiducial_file_for, write_fiducial_file
from ...frame import certify_sic
from ...models import StoredFiducial
from ...wh_group import build_wh_basis, orbit
from ..options import (
    EXIT_FAILURE, EXIT_USAGE, certificate_line, permutation, real_expression, usage_errors,
)

logger = logging.getLogger(__name__)


class Command(BaseCommand):
    help = (
        "Write the closed-form Weyl-Heisenberg fiducials for d = 2, 3, 4. "
        "Angles and radii accept expressions such as pi/3 or sqrt(2/3)."
    )

    def add_arguments(self, parser):
        parser.add_argument('-d', '--dimension', type=int, required=True, help="2, 3 or 4")
        parser.add_argument('--all', action='store_true', help="Emit the whole family and a class summary")
        parser.add_argument('--out-dir', default='.', help="Directory for the fiducial files")
        parser.add_argument('--save', action='store_true', help="Store the fiducials in the catalog")

        qubit = parser.add_argument_group('d = 2')
        qubit.add_argument('--which', type=int, default=0, choices=[0, 1], help="Which of the two fiducials")

        qutrit = parser.add_argument_group('d = 3')
        qutrit.add_argument('--r0', type=real_expression, help="Radius in (1/sqrt2, sqrt(2/3)]")
        qutrit.add_argument('--theta1', type=real_expression, default='pi', help="pi/3, pi or 5*pi/3")
        qutrit.add_argument('--theta2', type=real_expression, default='pi', help="pi/3, pi or 5*pi/3")
        qutrit.add_argument('--perm', type=permutation, default=(0, 1, 2), help="Component permutation, e.g. 021")
        qutrit.add_argument('--boundary-theta', type=real_expression,
                            help="Use the (1, e^(i theta), 0)/sqrt2 family at this phase")

        ququart = parser.add_argument_group('d = 4')
        for name, upper in (('j', 1), ('k', 1), ('m', 1), ('n', 3)):
            ququart.add_argument(f'--{name}', type=int, default=0, choices=range(upper + 1))
        ququart.add_argument('--swap', action='store_true', help="Exchange the r+ and r- components")
        ququart.add_argument('--cycle', type=int, default=0, choices=range(4), help="Cyclic shift of the column")

    def fiducials(self, d, options):
        if d == 2:
            return [fiducial_d2(0), fiducial_d2(1)] if options['all'] else [fiducial_d2(options['which'])]
        if d == 3:
            if options['boundary_theta'] is not None:
                theta = options['boundary_theta']
                if options['all']:
                    return d3_boundary_family(theta)
                return [fiducial_d3(D3Params(boundary=theta, perm=options['perm']))]
            if options['all']:
                return d3_family(options['r0'])
            return [fiducial_d3(D3Params(
                r0=options['r0'], theta1=options['theta1'], theta2=options['theta2'], perm=options['perm'],
            ))]
        if options['all']:
            return d4_family()
        return [fiducial_d4(D4Params(
            j=options['j'], k=options['k'], m=options['m'], n=options['n'],
            swap=options['swap'], cycle=options['cycle'],
        ))]

    def handle(self, *args, **options):
        d = options['dimension']
        if d not in (2, 3, 4):
            raise CommandError(f"Closed forms exist for d = 2, 3, 4 only, got d={d}", returncode=EXIT_USAGE)

        with usage_errors():
            fiducials = self.fiducials(d, options)

        out_dir = options['out_dir']
        try:
            os.makedirs(out_dir, exist_ok=True)
        except OSError as e:
            raise CommandError(f"Cannot create {out_dir}: {e.strerror}", returncode=EXIT_FAILURE) from e

        basis = build_wh_basis(d)
        tol = tolerance_profile('analytic')
        failures = 0
        for index, fiducial in enumerate(fiducials):
            certificate = certify_sic(orbit(fiducial, basis), tol=tol)
            failures += not certificate.passed
            fiducial_file = fiducial_file_for(fiducial, method='analytic')
            path = os.path.join(out_dir, f"fiducial_d{d}_{index:03d}.json")
            write_fiducial_file(fiducial_file, path)
            if options['save']:
                StoredFiducial.from_fiducial_file(fiducial_file, converged=certificate.passed)
            self.stdout.write(f"{path}  {certificate_line(certificate)}")

        if options['all'] and not failures:
            fold = fold_fiducials(fiducials, basis, tol=sic_setting('DEDUP_TOL'))
            separation = f"{fold.min_separation:.3e}" if fold.min_separation is not None else "n/a"
            self.stdout.write(
                f"d={d}: {len(fiducials)} fiducials in {len(fold.representatives)} distinct SICs "
                f"(min separation {separation})"
            )
        if failures:
            raise CommandError(f"{failures} fiducial(s) failed certification at tol={tol}", returncode=EXIT_FAILURE)
