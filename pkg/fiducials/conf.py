"""
Settings access for the fiducials app.

Values come from the ``SIC_POVM`` dict in Django settings, falling back to
the defaults below. Numerical code takes explicit arguments; only the
entry points (commands, views, config factories) read from here.
"""
import os

from django.conf import settings

DEFAULTS = {
    'ANALYTIC_TOL': 1e-12,
    'NUMERIC_TOL': 1e-8,
    'BASIS_TOL': 1e-10,
    'GRAM_RANK_TOL': 1e-8,
    'DEDUP_TOL': 1e-6,
    'MAX_DIMENSION': 64,
    'SEARCH_MAX_ITERATIONS': 5000,
    'SEARCH_GRADIENT_TOL': 1e-9,
    'SEARCH_OBJECTIVE_TOL': 1e-10,
    'SEARCH_RESTARTS_PER_DIMENSION': 32,
    'CENSUS_CONTINUUM_MIN_RUNS': 100,
    'CENSUS_CONTINUUM_TAIL': 0.2,
    'CENSUS_MIN_CONVERGED_FRACTION': 0.1,
    'CENSUS_RECOMMENDED_MAX_DIMENSION': 7,
    'THREADS': None,
    'RUN_SLOW_TESTS': False,
}

TOLERANCE_PROFILES = {
    'analytic': 'ANALYTIC_TOL',
    'numeric': 'NUMERIC_TOL',
}


def sic_setting(name):
    """Look up one SIC_POVM setting"""
    if name not in DEFAULTS:
        raise KeyError(f"Unknown SIC_POVM setting: {name}")
    user_settings = getattr(settings, 'SIC_POVM', None) or {}
    return user_settings.get(name, DEFAULTS[name])


def tolerance_profile(profile):
    """Certificate tolerance for the 'analytic' or 'numeric' profile"""
    try:
        return sic_setting(TOLERANCE_PROFILES[profile])
    except KeyError:
        raise KeyError(f"Unknown tolerance profile: {profile}") from None


def resolve_workers(workers=None):
    """
    Number of worker processes: an explicit value wins, then the THREADS
    setting (SIC_THREADS), then a single process.
    """
    if workers is None:
        workers = sic_setting('THREADS')
    if not workers:
        return 1
    return max(1, min(int(workers), os.cpu_count() or 1))
