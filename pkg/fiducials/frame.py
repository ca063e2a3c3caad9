"""
Frame-theoretic analysis of finite sets of unit vectors in C^d.

Everything here reduces to pairwise overlaps <psi_j|psi_k>; the t-fold
frame operator S_t and the symmetric projector are never built.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .exceptions import DomainError, StructuralError

logger = logging.getLogger(__name__)

NORM_TOL = 1e-12
DEFAULT_DESIGN_TOL = 1e-8
DEFAULT_SIC_TOL = 1e-8
DEFAULT_RANK_TOL = 1e-8
# relative roundoff floor of a frame potential built from O(n^2) terms
POTENTIAL_ROUNDOFF = 1e-12

INSUFFICIENT_SUPPORT = 'insufficient_support'
NOT_D_SQUARED = 'n_not_d_squared'


@dataclass(frozen=True, eq=False)
class VectorSet:
    """An ordered list of n unit vectors in C^d, stored as an (n, d) array"""
    d: int
    vectors: np.ndarray

    def __post_init__(self):
        vectors = np.array(self.vectors, dtype=complex)
        if self.d < 1:
            raise DomainError(f"Dimension must be positive, got {self.d}")
        if vectors.ndim != 2 or vectors.shape[1] != self.d:
            raise StructuralError(
                f"Expected an (n, {self.d}) array of vectors, got shape {vectors.shape}",
                details={"shape": list(vectors.shape)},
            )
        if vectors.shape[0] < 1:
            raise StructuralError("A vector set needs at least one vector")
        norm_error = float(np.max(np.abs(np.linalg.norm(vectors, axis=1) - 1.0)))
        if norm_error > NORM_TOL:
            raise DomainError(
                f"Vectors must have unit norm (max deviation {norm_error:.3e})",
                details={"norm_error": norm_error},
            )
        vectors.flags.writeable = False
        object.__setattr__(self, 'vectors', vectors)

    @classmethod
    def from_vectors(cls, vectors, normalize=False):
        vectors = np.atleast_2d(np.asarray(vectors, dtype=complex))
        if normalize:
            vectors = vectors / np.linalg.norm(vectors, axis=1, keepdims=True)
        return cls(d=vectors.shape[1], vectors=vectors)

    @property
    def n(self):
        return self.vectors.shape[0]

    def overlaps(self):
        """Matrix of inner products, entry (j, k) = <psi_j|psi_k>"""
        return self.vectors.conj() @ self.vectors.T

    def overlap_squares(self):
        """|<psi_j|psi_k>|^2, which is also the projector Gram matrix (Pi_j, Pi_k)"""
        return np.abs(self.overlaps()) ** 2

    def projectors(self):
        return np.einsum('ki,kj->kij', self.vectors, self.vectors.conj())


@dataclass(frozen=True)
class DesignCertificate:
    t: int
    n: int
    d: int
    potential: float
    threshold: float
    deviation: float
    passed: bool
    tol: float
    max_overlap_error: float | None = None
    flags: tuple = ()


@dataclass(frozen=True)
class CompletenessReport:
    rank: int
    gram_eigenvalues: tuple
    informationally_complete: bool
    tol: float


@dataclass(frozen=True, eq=False)
class SimplexEmbedding:
    sigmas: np.ndarray
    gram: np.ndarray = field(repr=False)


def frame_operator(vector_set: VectorSet) -> np.ndarray:
    """S = sum_k |psi_k><psi_k|"""
    vectors = vector_set.vectors
    return vectors.T @ vectors.conj()


def frame_bounds(vector_set: VectorSet) -> tuple[float, float]:
    """Lower and upper frame bounds: extreme eigenvalues of S"""
    eigenvalues = np.linalg.eigvalsh(frame_operator(vector_set))
    return float(eigenvalues[0]), float(eigenvalues[-1])


def is_tight_frame(vector_set: VectorSet, tol: float = 1e-10) -> bool:
    d = vector_set.d
    deviation = frame_operator(vector_set) - (vector_set.n / d) * np.eye(d)
    return bool(np.max(np.abs(deviation)) <= tol)


def frame_potential(vector_set: VectorSet, t: int = 1) -> float:
    """
    Tr[S_t^2] = sum_{j,k} |<psi_j|psi_k>|^(2t), accumulated with math.fsum
    so that the n^2 terms of large sets do not lose digits.
    """
    if int(t) != t or t < 1:
        raise DomainError(f"Design order t must be a positive integer, got {t}")
    terms = vector_set.overlap_squares() ** int(t)
    return math.fsum(terms.ravel().tolist())


def bf_lower_bound(n: int, d: int) -> float:
    if n < 1 or d < 1:
        raise DomainError(f"Need n >= 1 and d >= 1, got n={n}, d={d}")
    return max(float(n), n * n / d)


def t_design_threshold(n: int, d: int, t: int) -> float:
    """n^2 t!(d-1)!/(t+d-1)!, as the product of i/(d-1+i) for i = 1..t"""
    if n < 1 or d < 1 or t < 1:
        raise DomainError(f"Need n, d, t >= 1, got n={n}, d={d}, t={t}")
    ratio = 1.0
    for i in range(1, t + 1):
        ratio *= i / (d - 1 + i)
    return n * n * ratio


def symmetric_subspace_dim(d: int, t: int) -> int:
    if d < 1 or t < 1:
        raise DomainError(f"Need d, t >= 1, got d={d}, t={t}")
    return math.comb(t + d - 1, d - 1)


def matching_design_tol(sic_tol: float, n: int, d: int) -> float:
    """
    Potential tolerance for certify_design(t=2) that matches an overlap
    tolerance for certify_sic. For n = d^2 the potential excess is at least
    twice the largest squared overlap error, so 2*sic_tol^2 is the exact
    counterpart; the floor keeps true SICs above double roundoff.
    """
    threshold = t_design_threshold(n, d, 2)
    return max(2.0 * sic_tol ** 2, POTENTIAL_ROUNDOFF * threshold)


def certify_design(vector_set: VectorSet, t: int = 2, tol: float = DEFAULT_DESIGN_TOL) -> DesignCertificate:
    n, d = vector_set.n, vector_set.d
    potential = frame_potential(vector_set, t)
    threshold = t_design_threshold(n, d, t)
    deviation = potential - threshold
    flags = []
    if n < symmetric_subspace_dim(d, t):
        flags.append(INSUFFICIENT_SUPPORT)
    passed = not flags and deviation <= tol
    return DesignCertificate(
        t=t, n=n, d=d,
        potential=potential,
        threshold=threshold,
        deviation=deviation,
        passed=passed,
        tol=tol,
        flags=tuple(flags),
    )


def certify_sic(vector_set: VectorSet, tol: float = DEFAULT_SIC_TOL) -> DesignCertificate:
    """
    Certify |<phi_j|phi_k>|^2 = 1/(d+1) for all j != k on a set of d^2
    vectors. The t=2 potential fields are filled alongside.
    """
    n, d = vector_set.n, vector_set.d
    squares = vector_set.overlap_squares()
    off_diagonal = squares[~np.eye(n, dtype=bool)]
    target = 1.0 / (d + 1)
    max_error = float(np.max(np.abs(off_diagonal - target))) if off_diagonal.size else 0.0

    flags = []
    if n != d * d:
        flags.append(NOT_D_SQUARED)
    potential = math.fsum((squares ** 2).ravel().tolist())
    threshold = t_design_threshold(n, d, 2)
    passed = not flags and max_error <= tol
    return DesignCertificate(
        t=2, n=n, d=d,
        potential=potential,
        threshold=threshold,
        deviation=potential - threshold,
        passed=passed,
        tol=tol,
        max_overlap_error=max_error,
        flags=tuple(flags),
    )


def informational_completeness(vector_set: VectorSet, tol: float = DEFAULT_RANK_TOL) -> CompletenessReport:
    """
    Numerical rank of the projector Gram matrix (Pi_j, Pi_k). Eigenvalues
    below tol times the largest one count as zero.
    """
    gram = vector_set.overlap_squares()
    eigenvalues = np.linalg.eigvalsh(gram)[::-1]
    scale = float(np.max(np.abs(eigenvalues)))
    rank = int(np.sum(np.abs(eigenvalues) > tol * scale))
    return CompletenessReport(
        rank=rank,
        gram_eigenvalues=tuple(float(x) for x in eigenvalues),
        informationally_complete=rank == vector_set.d ** 2,
        tol=tol,
    )


def circulant_gram_spectrum(vector_set: VectorSet) -> np.ndarray:
    """
    Spectrum of the projector Gram matrix of a Weyl-Heisenberg orbit given
    in row-major (j, k) label order. The Gram matrix depends only on the
    label difference, so its eigenvalues are the 2-D DFT of the first row.
    """
    d = vector_set.d
    if vector_set.n != d * d:
        raise StructuralError(f"Expected a full orbit of {d * d} vectors, got {vector_set.n}")
    row = np.abs(vector_set.vectors.conj() @ vector_set.vectors[0]) ** 2
    spectrum = np.real(np.fft.fft2(row.reshape(d, d))).ravel()
    return np.sort(spectrum)[::-1]


def simplex_embedding(vector_set: VectorSet) -> SimplexEmbedding:
    d = vector_set.d
    if d < 2:
        raise DomainError("The simplex embedding needs d >= 2")
    scale = math.sqrt(d / (d - 1))
    sigmas = scale * (vector_set.projectors() - np.eye(d) / d)
    # Tr[sigma_j sigma_k] = d/(d-1) * (|<phi_j|phi_k>|^2 - 1/d)
    gram = (d / (d - 1)) * (vector_set.overlap_squares() - 1.0 / d)
    return SimplexEmbedding(sigmas=sigmas, gram=gram)


def two_design_average(A: np.ndarray) -> np.ndarray:
    """Haar average of <psi|A|psi> Pi_psi: (A + Tr[A] I) / (d(d+1))"""
    d = A.shape[0]
    return (A + np.trace(A) * np.eye(d)) / (d * (d + 1))


def _check_operator(vector_set, A):
    A = np.asarray(A, dtype=complex)
    if A.shape != (vector_set.d, vector_set.d):
        raise DomainError(
            f"Operator shape {A.shape} does not match dimension {vector_set.d}",
            details={"shape": list(A.shape), "d": vector_set.d},
        )
    return A


def design_average(vector_set: VectorSet, A: np.ndarray) -> np.ndarray:
    """(1/n) sum_k <phi_k|A|phi_k> Pi_k"""
    A = _check_operator(vector_set, A)
    vectors = vector_set.vectors
    expectations = np.einsum('ki,ij,kj->k', vectors.conj(), A, vectors)
    return np.einsum('k,ki,kj->ij', expectations, vectors, vectors.conj()) / vector_set.n


def design_average_error(vector_set: VectorSet, A: np.ndarray) -> float:
    A = _check_operator(vector_set, A)
    return float(np.max(np.abs(design_average(vector_set, A) - two_design_average(A))))


def measurement_probabilities(vector_set: VectorSet, rho: np.ndarray) -> np.ndarray:
    """Outcome distribution p_k = <phi_k|rho|phi_k>/d of the POVM {Pi_k/d}"""
    rho = _check_operator(vector_set, rho)
    vectors = vector_set.vectors
    return np.real(np.einsum('ki,ij,kj->k', vectors.conj(), rho, vectors)) / vector_set.d


def reconstruct_state(vector_set: VectorSet, probabilities) -> np.ndarray:
    """Linear inversion rho = (d+1) sum_k p_k Pi_k - I, exact for SIC-POVMs"""
    d = vector_set.d
    probabilities = np.asarray(probabilities, dtype=float)
    if probabilities.shape != (vector_set.n,):
        raise StructuralError(
            f"Expected {vector_set.n} probabilities, got shape {probabilities.shape}"
        )
    vectors = vector_set.vectors
    weighted = np.einsum('k,ki,kj->ij', probabilities, vectors, vectors.conj())
    return (d + 1) * weighted - np.eye(d)
