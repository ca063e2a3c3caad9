"""
Fiducial files: a fiducial vector, the basis that generates its orbit and
where it came from, stored as JSON.

Floats are written in Python's shortest round-trip form, so amplitudes
survive a write/read cycle bit for bit.
"""
from __future__ import annotations

import io
import logging
from dataclasses import dataclass, field
from datetime import datetime

import numpy as np
from django.utils import timezone
from rest_framework.exceptions import ParseError
from rest_framework.parsers import JSONParser
from rest_framework.renderers import JSONRenderer

from .exceptions import FiducialFileError
from .frame import certify_sic
from .search import objective
from .wh_group import ErrorBasis, Fiducial, build_wh_basis, orbit

logger = logging.getLogger(__name__)

FORMAT_VERSION = 1
WH_BASIS = 'wh'
LOAD_NORM_TOL = 1e-9
RENORMALIZE_TOL = 1e-12


def render_json(data, indent=2) -> bytes:
    return JSONRenderer().render(data, renderer_context={"indent": indent}) + b"\n"


def parse_json(source, error_class=FiducialFileError) -> dict:
    """Decode a JSON object from bytes, text or a readable file object"""
    if isinstance(source, str):
        source = source.encode('utf-8')
    stream = io.BytesIO(source) if isinstance(source, (bytes, bytearray)) else source
    try:
        data = JSONParser().parse(stream)
    except ParseError as e:
        raise error_class(f"Invalid JSON: {e.detail}") from e
    if not isinstance(data, dict):
        raise error_class(f"Expected a JSON object, got {type(data).__name__}")
    return data


@dataclass(frozen=True)
class Provenance:
    method: str
    seed: int | None = None
    objective: float | None = None
    sic_deviation: float | None = None
    timestamp: datetime | None = None


@dataclass(frozen=True, eq=False)
class FiducialFile:
    d: int
    amplitudes: np.ndarray
    basis: str | ErrorBasis = WH_BASIS
    provenance: Provenance = field(default_factory=lambda: Provenance(method='analytic'))
    format_version: int = FORMAT_VERSION

    @property
    def fiducial(self) -> Fiducial:
        return Fiducial(d=self.d, amplitudes=self.amplitudes)

    def resolve_basis(self) -> ErrorBasis:
        if isinstance(self.basis, ErrorBasis):
            return self.basis
        return build_wh_basis(self.d)


def fiducial_file_for(fiducial: Fiducial, basis: ErrorBasis | None = None, *, method: str,
                      seed: int | None = None) -> FiducialFile:
    """Wrap a fiducial with freshly computed provenance"""
    resolved = basis if basis is not None else build_wh_basis(fiducial.d)
    certificate = certify_sic(orbit(fiducial, resolved))
    return FiducialFile(
        d=fiducial.d,
        amplitudes=fiducial.amplitudes,
        basis=basis if basis is not None else WH_BASIS,
        provenance=Provenance(
            method=method,
            seed=seed,
            objective=objective(fiducial, resolved),
            sic_deviation=certificate.max_overlap_error,
            timestamp=timezone.now(),
        ),
    )


def dump_fiducial_file(fiducial_file: FiducialFile) -> bytes:
    from .serializers import FiducialFileSerializer

    return render_json(FiducialFileSerializer(fiducial_file).data)


def write_fiducial_file(fiducial_file: FiducialFile, path) -> None:
    with open(path, 'wb') as handle:
        handle.write(dump_fiducial_file(fiducial_file))
    logger.info(f"Wrote d={fiducial_file.d} fiducial to {path}")


def load_fiducial_file(source) -> FiducialFile:
    """
    Decode and validate a fiducial file. Amplitudes off unit norm by more
    than 1e-12 are renormalized with a warning; more than 1e-9 is an error.
    """
    from .serializers import FiducialFileSerializer

    serializer = FiducialFileSerializer(data=parse_json(source, FiducialFileError))
    if not serializer.is_valid():
        raise FiducialFileError("Malformed fiducial file", details=serializer.errors)
    fiducial_file = serializer.save()

    norm_error = abs(float(np.linalg.norm(fiducial_file.amplitudes)) - 1.0)
    if norm_error > LOAD_NORM_TOL:
        raise FiducialFileError(
            f"Amplitudes are not normalized (norm deviation {norm_error:.3e})",
            details={"norm_error": norm_error, "tol": LOAD_NORM_TOL},
        )
    if norm_error > RENORMALIZE_TOL:
        logger.warning(f"Renormalizing loaded amplitudes (norm deviation {norm_error:.3e})")
        amplitudes = fiducial_file.amplitudes / np.linalg.norm(fiducial_file.amplitudes)
        fiducial_file = FiducialFile(
            d=fiducial_file.d,
            amplitudes=amplitudes,
            basis=fiducial_file.basis,
            provenance=fiducial_file.provenance,
            format_version=fiducial_file.format_version,
        )
    return fiducial_file


def read_fiducial_file(path) -> FiducialFile:
    try:
        with open(path, 'rb') as handle:
            return load_fiducial_file(handle.read())
    except OSError as e:
        raise FiducialFileError(f"Cannot read {path}: {e.strerror}", details={"path": str(path)}) from e
