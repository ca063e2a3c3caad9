"""
Counting distinct SIC-POVMs generated by one fixed group representation.

Two certified fiducials give the same SIC exactly when one lies (up to
phase) in the other's orbit, so deduplication compares a new fiducial with
the stacked orbits of the representatives found so far.
"""
from __future__ import annotations

import dataclasses
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .exceptions import DomainError
from .frame import certify_sic
from .search import SearchConfig, map_in_order, multi_start, restart_seeds
from .wh_group import ErrorBasis, Fiducial, build_wh_basis, orbit

logger = logging.getLogger(__name__)

DEFAULT_DEDUP_TOL = 1e-6
CERTIFICATION_TOL = 1e-8


@dataclass(eq=False)
class Census:
    d: int
    runs: int
    seed: int
    representatives: list = field(default_factory=list)
    new_solution_curve: list = field(default_factory=list)
    discovery_runs: list = field(default_factory=list)
    converged_runs: int = 0
    continuum_suspected: bool = False
    low_confidence: bool = False
    min_separation: float | None = None
    restarts_per_run: int = 1
    dedup_tol: float = DEFAULT_DEDUP_TOL

    @property
    def count(self):
        return len(self.representatives)

    @property
    def converged_fraction(self):
        return self.converged_runs / self.runs if self.runs else 0.0


@dataclass(eq=False)
class FoldResult:
    representatives: list
    assignments: list
    min_separation: float | None


def _require_certified(fiducial, basis):
    certificate = certify_sic(orbit(fiducial, basis), tol=CERTIFICATION_TOL)
    if not certificate.passed:
        raise DomainError(
            "Orbit comparison needs certified SIC fiducials",
            details={"max_overlap_error": certificate.max_overlap_error, "tol": CERTIFICATION_TOL},
        )


def orbit_fidelity(a: Fiducial, b: Fiducial, basis: ErrorBasis) -> float:
    """max_g |<b|U_g|a>|^2"""
    if a.d != basis.d or b.d != basis.d:
        raise DomainError(
            f"Fiducial dimensions ({a.d}, {b.d}) do not match basis dimension {basis.d}",
            details={"a_d": a.d, "b_d": b.d, "basis_d": basis.d},
        )
    vectors = basis.ops @ a.amplitudes
    return float(np.max(np.abs(vectors @ b.amplitudes.conj()) ** 2))


def same_sic(a: Fiducial, b: Fiducial, basis: ErrorBasis, tol: float = DEFAULT_DEDUP_TOL) -> bool:
    """True when the orbits of a and b are the same set of projectors"""
    _require_certified(a, basis)
    _require_certified(b, basis)
    return orbit_fidelity(a, b, basis) >= 1 - tol


class OrbitBank:
    """
    Representatives of the distinct orbits seen so far, with all their
    orbit vectors stacked into one array so a new fiducial is compared
    with every class in a single product.
    """

    def __init__(self, basis: ErrorBasis, tol: float = DEFAULT_DEDUP_TOL):
        if not 0 < tol < 1:
            raise DomainError(f"Dedup tolerance must lie in (0, 1), got {tol}")
        self.basis = basis
        self.tol = tol
        self.representatives = []
        self.min_separation = None
        self._blocks = []
        self._stacked = np.empty((0, basis.d), dtype=complex)

    def _fidelities(self, fiducial):
        if not self.representatives:
            return np.empty(0)
        squares = np.abs(self._stacked @ fiducial.amplitudes.conj()) ** 2
        return squares.reshape(len(self.representatives), self.basis.n).max(axis=1)

    def add(self, fiducial: Fiducial) -> tuple[int, bool]:
        """Class index of ``fiducial`` and whether it opened a new class"""
        fidelities = self._fidelities(fiducial)
        if fidelities.size:
            best = int(np.argmax(fidelities))
            if fidelities[best] >= 1 - self.tol:
                return best, False
            separation = float(1 - fidelities[best])
            if self.min_separation is None or separation < self.min_separation:
                self.min_separation = separation

        self.representatives.append(fiducial)
        self._blocks.append(orbit(fiducial, self.basis).vectors)
        self._stacked = np.concatenate(self._blocks)
        return len(self.representatives) - 1, True


def fold_fiducials(fiducials, basis: ErrorBasis, tol: float = DEFAULT_DEDUP_TOL) -> FoldResult:
    """
    Group certified fiducials into SIC classes. Representatives are the
    first member of each class in input order; the class count does not
    depend on the order when classes are separated by more than tol.
    """
    bank = OrbitBank(basis, tol)
    assignments = []
    for fiducial in fiducials:
        _require_certified(fiducial, basis)
        index, _ = bank.add(fiducial)
        assignments.append(index)
    return FoldResult(
        representatives=list(bank.representatives),
        assignments=assignments,
        min_separation=bank.min_separation,
    )


def _run_search(config):
    return multi_start(config, workers=1, quiet=True)


def census(d: int, runs: int, seed: int, basis: ErrorBasis | None = None, *,
           restarts_per_run: int = 1,
           dedup_tol: float = DEFAULT_DEDUP_TOL,
           template: SearchConfig | None = None,
           workers: int = 1,
           callback=None,
           continuum_min_runs: int = 100,
           continuum_tail: float = 0.2,
           min_converged_fraction: float = 0.1) -> Census:
    """
    Run ``runs`` independent multi-start searches and fold every converged
    fiducial into the set of distinct SICs. Searches may run in parallel;
    the fold always consumes them in run order.

    ``callback(run_index, outcome, census)`` is called after each run is
    folded (run_index counts from 1).
    """
    if runs < 1:
        raise DomainError(f"runs must be >= 1, got {runs}")
    if seed < 0:
        raise DomainError(f"seed must be non-negative, got {seed}")
    basis = basis if basis is not None else build_wh_basis(d)
    if template is None:
        template = SearchConfig(d=d, basis=basis, restarts=restarts_per_run)
    elif template.d != d:
        raise DomainError(f"Search template is for d={template.d}, census for d={d}")
    template = dataclasses.replace(template, basis=basis, restarts=restarts_per_run)

    result = Census(d=d, runs=runs, seed=seed, restarts_per_run=restarts_per_run, dedup_tol=dedup_tol)
    bank = OrbitBank(basis, dedup_tol)
    configs = [dataclasses.replace(template, rng_seed=run_seed) for run_seed in restart_seeds(seed, runs)]

    for run_index, outcome in enumerate(map_in_order(_run_search, configs, workers), start=1):
        converged = [item for item in outcome.results if item.converged]
        if converged:
            result.converged_runs += 1
        for item in converged:
            index, is_new = bank.add(item.fiducial)
            if is_new:
                result.discovery_runs.append(run_index)
                logger.info(f"Census d={d}: run {run_index} found SIC class #{index + 1}")
        result.representatives = list(bank.representatives)
        result.new_solution_curve.append((run_index, len(bank.representatives)))
        if callback is not None:
            callback(run_index, outcome, result)

    result.min_separation = bank.min_separation
    tail_start = math.floor(runs * (1 - continuum_tail))
    result.continuum_suspected = runs >= continuum_min_runs and any(
        run_index > tail_start for run_index in result.discovery_runs
    )
    result.low_confidence = result.converged_fraction < min_converged_fraction
    logger.info(
        f"Census d={d} seed={seed}: {result.count} distinct SICs over {runs} runs "
        f"({result.converged_runs} converged), continuum_suspected={result.continuum_suspected}"
    )
    if result.low_confidence:
        logger.warning(
            f"Census d={d} is low confidence: only {result.converged_fraction:.1%} of runs converged"
        )
    return result
