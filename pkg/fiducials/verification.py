"""Certificates for one fiducial: t=1 and t=2 designs, SIC overlaps, completeness"""
from __future__ import annotations

from dataclasses import dataclass

from .frame import (
    DEFAULT_SIC_TOL, POTENTIAL_ROUNDOFF, CompletenessReport, DesignCertificate, certify_design,
    certify_sic, informational_completeness, matching_design_tol, t_design_threshold,
)
from .wh_group import ErrorBasis, Fiducial, one_design_deviation, orbit


@dataclass(frozen=True)
class VerificationReport:
    d: int
    designs: tuple
    sic: DesignCertificate
    completeness: CompletenessReport
    one_design_deviation: float

    @property
    def passed(self):
        return self.sic.passed

    def design(self, t):
        return next(certificate for certificate in self.designs if certificate.t == t)


def design_tol(sic_tol: float, n: int, d: int, t: int) -> float:
    if t == 2:
        return matching_design_tol(sic_tol, n, d)
    return max(sic_tol, POTENTIAL_ROUNDOFF * t_design_threshold(n, d, t))


def verify_fiducial(fiducial: Fiducial, basis: ErrorBasis, tol: float = DEFAULT_SIC_TOL,
                    extra_t: int | None = None, rank_tol: float = 1e-8) -> VerificationReport:
    vector_set = orbit(fiducial, basis)
    orders = [1, 2]
    if extra_t is not None and extra_t not in orders:
        orders.append(extra_t)
    designs = tuple(
        certify_design(vector_set, t, tol=design_tol(tol, vector_set.n, vector_set.d, t))
        for t in orders
    )
    return VerificationReport(
        d=fiducial.d,
        designs=designs,
        sic=certify_sic(vector_set, tol=tol),
        completeness=informational_completeness(vector_set, tol=rank_tol),
        one_design_deviation=one_design_deviation(fiducial, basis),
    )
