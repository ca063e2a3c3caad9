"""
Weyl-Heisenberg displacement operators, orthogonal unitary (nice error)
bases and group orbits of fiducial vectors.

Convention: D_jk = mu^(jk) sum_m omega^(jm) |k+m><m| with omega = exp(2 pi i/d)
and mu = exp(i pi/d), so the half-integer phase omega^(jk/2) is the same
fixed 2d-th root of unity for every d. Labels run 0..d-1 in row-major
(j, k) order and (0, 0) is the identity.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .exceptions import (
    BasisParseError, DomainError, LabelIndexError, RejectedBasisError, StructuralError,
)
from .frame import VectorSet

logger = logging.getLogger(__name__)

NORM_TOL = 1e-12
GAUGE_EPS = 1e-12
DEFAULT_BASIS_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class ErrorBasis:
    """
    A dimension d plus labeled d x d unitaries. Structure (array shapes,
    one label per operator) is checked here; the operator-basis properties
    are checked by validate_error_basis.
    """
    d: int
    ops: np.ndarray
    labels: tuple

    def __post_init__(self):
        ops = np.array(self.ops, dtype=complex)
        if ops.ndim != 3 or ops.shape[1:] != (self.d, self.d):
            raise StructuralError(
                f"Expected operators of shape ({self.d}, {self.d}), got array of shape {ops.shape}",
                details={"shape": list(ops.shape), "d": self.d},
            )
        labels = tuple(tuple(label) if isinstance(label, (list, tuple)) else label
                       for label in self.labels)
        if len(labels) != ops.shape[0]:
            raise StructuralError(
                f"Got {ops.shape[0]} operators but {len(labels)} labels",
                details={"operators": ops.shape[0], "labels": len(labels)},
            )
        ops.flags.writeable = False
        object.__setattr__(self, 'ops', ops)
        object.__setattr__(self, 'labels', labels)

    @property
    def n(self):
        return self.ops.shape[0]

    @cached_property
    def identity_index(self):
        """Index of the operator proportional to the identity"""
        traces = np.abs(np.einsum('gii->g', self.ops))
        return int(np.argmax(traces))

    def index_of(self, label):
        try:
            return self.labels.index(tuple(label) if isinstance(label, list) else label)
        except ValueError:
            raise LabelIndexError(f"Unknown group label {label!r}") from None

    def canonical(self):
        """
        Same basis with the identity-proportional element moved to index 0
        and rephased to exactly I.
        """
        index = self.identity_index
        trace = np.trace(self.ops[index])
        order = [index] + [g for g in range(self.n) if g != index]
        ops = self.ops[order].copy()
        ops[0] = ops[0] * (np.conj(trace) / abs(trace))
        return ErrorBasis(d=self.d, ops=ops, labels=tuple(self.labels[g] for g in order))


@dataclass(frozen=True, eq=False)
class Fiducial:
    """A unit vector in C^d whose group orbit is examined"""
    d: int
    amplitudes: np.ndarray

    def __post_init__(self):
        amplitudes = np.array(self.amplitudes, dtype=complex)
        if amplitudes.shape != (self.d,):
            raise StructuralError(
                f"Expected {self.d} amplitudes, got shape {amplitudes.shape}",
                details={"shape": list(amplitudes.shape), "d": self.d},
            )
        norm_error = abs(float(np.linalg.norm(amplitudes)) - 1.0)
        if norm_error > NORM_TOL:
            raise DomainError(
                f"Fiducial must be normalized (norm deviation {norm_error:.3e})",
                details={"norm_error": norm_error},
            )
        amplitudes.flags.writeable = False
        object.__setattr__(self, 'amplitudes', amplitudes)

    @classmethod
    def from_vector(cls, vector, normalize=True, gauge=False):
        vector = np.asarray(vector, dtype=complex).ravel()
        if normalize:
            norm = np.linalg.norm(vector)
            if norm == 0:
                raise DomainError("Cannot normalize the zero vector")
            vector = vector / norm
        fiducial = cls(d=vector.shape[0], amplitudes=vector)
        return fiducial.canonical() if gauge else fiducial

    def _leading_index(self):
        return int(np.argmax(np.abs(self.amplitudes) > GAUGE_EPS))

    @property
    def is_canonical(self):
        leading = self.amplitudes[self._leading_index()]
        return abs(np.angle(leading)) <= GAUGE_EPS

    def canonical(self):
        """Gauge-fixed copy: the first nonzero amplitude is real and positive"""
        leading = self.amplitudes[self._leading_index()]
        phase = np.conj(leading) / abs(leading)
        amplitudes = self.amplitudes * phase
        amplitudes[self._leading_index()] = abs(leading)
        return Fiducial(d=self.d, amplitudes=amplitudes)


@dataclass(frozen=True)
class BasisReport:
    d: int
    n: int
    unitarity_deviation: float
    orthogonality_deviation: float
    identity_count: int
    tol: float
    passed: bool


def _check_dimension(d):
    if int(d) != d or d < 2:
        raise DomainError(f"Dimension must be an integer >= 2, got {d}", details={"d": d})


def _check_match(fiducial, basis):
    if fiducial.d != basis.d:
        raise DomainError(
            f"Fiducial dimension {fiducial.d} does not match basis dimension {basis.d}",
            details={"fiducial_d": fiducial.d, "basis_d": basis.d},
        )


def displacement(d: int, j: int, k: int) -> np.ndarray:
    _check_dimension(d)
    if not (0 <= j < d and 0 <= k < d):
        raise LabelIndexError(
            f"Displacement label ({j}, {k}) outside 0..{d - 1}",
            details={"d": d, "j": j, "k": k},
        )
    m = np.arange(d)
    # mu^(jk) omega^(jm) = exp(i pi (jk + 2jm) / d), exponent reduced mod 2d
    phases = np.exp(1j * np.pi * ((j * k + 2 * j * m) % (2 * d)) / d)
    op = np.zeros((d, d), dtype=complex)
    op[(k + m) % d, m] = phases
    return op


def build_wh_basis(d: int) -> ErrorBasis:
    _check_dimension(d)
    labels = tuple((j, k) for j in range(d) for k in range(d))
    ops = np.stack([displacement(d, j, k) for j, k in labels])
    return ErrorBasis(d=d, ops=ops, labels=labels)


def validate_error_basis(basis: ErrorBasis, tol: float = DEFAULT_BASIS_TOL) -> BasisReport:
    """
    Check unitarity of every operator and Tr[T_a^dag T_b] = d delta_ab.
    A wrong operator count raises StructuralError rather than failing.
    """
    d, n = basis.d, basis.n
    if n != d * d:
        raise StructuralError(
            f"A basis in dimension {d} needs {d * d} operators, got {n}",
            details={"expected": d * d, "actual": n},
        )
    ops = basis.ops
    products = np.einsum('gji,gjk->gik', ops.conj(), ops)
    unitarity = float(np.max(np.abs(products - np.eye(d))))
    gram = np.einsum('aij,bij->ab', ops.conj(), ops)
    orthogonality = float(np.max(np.abs(gram - d * np.eye(n))))
    traces = np.abs(np.einsum('gii->g', ops))
    identity_count = int(np.sum(np.abs(traces - d) <= tol * d))

    passed = unitarity <= tol and orthogonality <= tol and identity_count == 1
    logger.info(
        f"Validated error basis d={d}: unitarity={unitarity:.3e}, "
        f"orthogonality={orthogonality:.3e}, identities={identity_count}, passed={passed}"
    )
    return BasisReport(
        d=d, n=n,
        unitarity_deviation=unitarity,
        orthogonality_deviation=orthogonality,
        identity_count=identity_count,
        tol=tol,
        passed=passed,
    )


def orbit(fiducial: Fiducial, basis: ErrorBasis) -> VectorSet:
    """The vectors U_g|phi> in label order"""
    _check_match(fiducial, basis)
    vectors = basis.ops @ fiducial.amplitudes
    # exact for unitaries; absorbs the up-to-tolerance drift of loaded bases
    vectors = vectors / np.linalg.norm(vectors, axis=1, keepdims=True)
    return VectorSet(d=basis.d, vectors=vectors)


def one_design_operator(psi: Fiducial, basis: ErrorBasis) -> np.ndarray:
    """S_psi = sum_g U_g |psi><psi| U_g^dag, equal to d*I for an orthogonal unitary basis"""
    _check_match(psi, basis)
    vectors = basis.ops @ psi.amplitudes
    return vectors.T @ vectors.conj()


def one_design_deviation(psi: Fiducial, basis: ErrorBasis) -> float:
    d = basis.d
    return float(np.max(np.abs(one_design_operator(psi, basis) - d * np.eye(d))))


def haar_random_fiducial(d: int, rng: np.random.Generator) -> Fiducial:
    """Complex-Gaussian components, normalized: uniform on the unit sphere"""
    vector = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return Fiducial.from_vector(vector)


def dump_error_basis(basis: ErrorBasis) -> bytes:
    from .files import render_json
    from .serializers import ErrorBasisSerializer

    return render_json(ErrorBasisSerializer(basis).data)


def parse_error_basis(source) -> ErrorBasis:
    """Decode a basis from JSON bytes (or a binary file object) without validating it"""
    from .files import parse_json
    from .serializers import ErrorBasisSerializer

    serializer = ErrorBasisSerializer(data=parse_json(source, BasisParseError))
    if not serializer.is_valid():
        raise BasisParseError("Malformed error basis", details=serializer.errors)
    return serializer.save()


def load_error_basis(source, tol: float = DEFAULT_BASIS_TOL) -> ErrorBasis:
    """Decode and validate a basis, returned with the identity element first"""
    return require_valid_basis(parse_error_basis(source), tol)


def require_valid_basis(basis: ErrorBasis, tol: float = DEFAULT_BASIS_TOL) -> ErrorBasis:
    """The canonical form of basis, or RejectedBasisError when validation fails"""
    report = validate_error_basis(basis, tol)
    if not report.passed:
        logger.error(
            f"Rejected error basis d={basis.d}: unitarity={report.unitarity_deviation:.3e}, "
            f"orthogonality={report.orthogonality_deviation:.3e}"
        )
        raise RejectedBasisError(
            "Loaded operators do not form an orthogonal unitary basis",
            details={
                "unitarity_deviation": report.unitarity_deviation,
                "orthogonality_deviation": report.orthogonality_deviation,
                "identity_count": report.identity_count,
                "tol": tol,
            },
        )
    return basis.canonical()
