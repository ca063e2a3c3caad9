"""Argument parsing and error translation shared by the management commands"""
import argparse
import math
from contextlib import contextmanager

import sympy
from django.core.management.base import CommandError
from rest_framework.exceptions import ValidationError

from ..conf import sic_setting
from ..exceptions import SicPovmError

EXIT_FAILURE = 1
EXIT_USAGE = 2
MAX_SEED = (1 << 63) - 1


@contextmanager
def usage_errors():
    """Turn library and validation errors into exit status 2"""
    try:
        yield
    except SicPovmError as e:
        raise CommandError(f"{e.message} [{e.error_code}] {e.details or ''}".rstrip(),
                           returncode=EXIT_USAGE) from e
    except ValidationError as e:
        raise CommandError(f"Invalid input: {e.detail}", returncode=EXIT_USAGE) from e


def real_expression(text):
    """argparse type for reals written as expressions such as pi/3 or sqrt(2/3)"""
    try:
        value = float(sympy.sympify(text, locals={'pi': sympy.pi}).evalf())
    except (sympy.SympifyError, TypeError, ValueError):
        raise argparse.ArgumentTypeError(f"not a real number or expression: {text!r}") from None
    if not math.isfinite(value):
        raise argparse.ArgumentTypeError(f"not finite: {text!r}")
    return value


def permutation(text):
    """argparse type for a permutation of 0..n-1 written as 0,2,1 or 021"""
    parts = text.split(',') if ',' in text else list(text)
    try:
        values = tuple(int(part) for part in parts)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a permutation: {text!r}") from None
    if sorted(values) != list(range(len(values))):
        raise argparse.ArgumentTypeError(f"not a permutation: {text!r}")
    return values


def check_dimension(d, upper=None):
    upper = upper or sic_setting('MAX_DIMENSION')
    if not 2 <= d <= upper:
        raise CommandError(f"Dimension must lie in 2..{upper}, got {d}", returncode=EXIT_USAGE)


def check_seed(seed):
    if not 0 <= seed <= MAX_SEED:
        raise CommandError(f"Seed must lie in 0..2^63-1, got {seed}", returncode=EXIT_USAGE)


def check_positive(name, value):
    if value is not None and not value > 0:
        raise CommandError(f"--{name} must be positive, got {value}", returncode=EXIT_USAGE)


def read_bytes(path):
    try:
        with open(path, 'rb') as handle:
            return handle.read()
    except OSError as e:
        raise CommandError(f"Cannot read {path}: {e.strerror}", returncode=EXIT_USAGE) from e


def certificate_line(certificate):
    label = 'SIC' if certificate.max_overlap_error is not None else f"t={certificate.t}"
    verdict = 'PASS' if certificate.passed else 'FAIL'
    line = (f"{label:<4} {verdict}  potential={certificate.potential:.15g} "
            f"threshold={certificate.threshold:.15g} deviation={certificate.deviation:.3e}")
    if certificate.max_overlap_error is not None:
        line += f" max_overlap_error={certificate.max_overlap_error:.3e}"
    if certificate.flags:
        line += f" flags={','.join(certificate.flags)}"
    return line
