"""
Numerical fiducial search: minimize f(phi) = sum_g |<phi|U_g|phi>|^4 over
unit vectors with a Polak-Ribiere conjugate gradient on the sphere and
multi-start from Haar-random points.

The line search tracks f through its gap form
    sum_{g != e} (|<phi|U_g|phi>|^2 - 1/(d+1))^2,
which equals f - 2d/(d+1) on the sphere whenever the basis is a 1-design
(sum_g |<phi|U_g|phi>|^2 = d for every unit phi).
"""
from __future__ import annotations

import logging
import multiprocessing
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import least_squares

from .exceptions import DomainError
from .frame import certify_sic
from .wh_group import ErrorBasis, Fiducial, build_wh_basis, haar_random_fiducial, orbit

logger = logging.getLogger(__name__)

ARMIJO = 1e-4
SHRINK = 0.5
INITIAL_MOVE = 0.1
# a step moving the iterate by less than this cannot change it in double precision
MIN_MOVE = 1e-16
SEED_MASK = (1 << 63) - 1
RESTARTS_PER_DIMENSION = 32
# below this gap every overlap is within 1e-4 of 1/(d+1) and the least-squares polish takes over
POLISH_GAP = 1e-8
# MINPACK refuses tolerances at or below machine epsilon
POLISH_TOL = 1e-15

STATUS_GRADIENT = 'gradient'
STATUS_STALLED = 'stalled'
STATUS_MAX_ITERATIONS = 'max_iterations'
STATUS_OBJECTIVE = 'objective'


@dataclass(frozen=True, eq=False)
class SearchConfig:
    d: int
    basis: ErrorBasis | None = None
    max_iterations: int = 5000
    gradient_tol: float = 1e-9
    objective_tol: float = 1e-10
    sic_tol: float = 1e-8
    restarts: int | None = None
    rng_seed: int = 0
    stop_on_success: bool = False

    def __post_init__(self):
        if int(self.d) != self.d or self.d < 2:
            raise DomainError(f"Dimension must be an integer >= 2, got {self.d}", details={"d": self.d})
        for name in ('gradient_tol', 'objective_tol', 'sic_tol'):
            if not getattr(self, name) > 0:
                raise DomainError(f"{name} must be positive, got {getattr(self, name)}")
        if self.restarts is None:
            object.__setattr__(self, 'restarts', RESTARTS_PER_DIMENSION * self.d)
        if self.restarts < 1:
            raise DomainError(f"restarts must be >= 1, got {self.restarts}")
        if self.max_iterations < 0:
            raise DomainError(f"max_iterations must be >= 0, got {self.max_iterations}")
        if self.rng_seed < 0:
            raise DomainError(f"rng_seed must be non-negative, got {self.rng_seed}")
        basis = self.basis if self.basis is not None else build_wh_basis(self.d)
        if basis.d != self.d or basis.n != self.d * self.d:
            raise DomainError(
                f"Basis (d={basis.d}, {basis.n} operators) does not fit dimension {self.d}",
                details={"basis_d": basis.d, "operators": basis.n, "d": self.d},
            )
        object.__setattr__(self, 'basis', basis)

    @classmethod
    def for_dimension(cls, d, basis=None, **overrides):
        """Config with defaults taken from the SIC_POVM settings"""
        from .conf import sic_setting, tolerance_profile

        values = {
            'max_iterations': sic_setting('SEARCH_MAX_ITERATIONS'),
            'gradient_tol': sic_setting('SEARCH_GRADIENT_TOL'),
            'objective_tol': sic_setting('SEARCH_OBJECTIVE_TOL'),
            'sic_tol': tolerance_profile('numeric'),
            'restarts': sic_setting('SEARCH_RESTARTS_PER_DIMENSION') * d,
        }
        values.update({key: value for key, value in overrides.items() if value is not None})
        return cls(d=d, basis=basis, **values)


@dataclass(frozen=True, eq=False)
class SearchResult:
    fiducial: Fiducial
    objective: float
    global_min: float
    gap: float
    sic_deviation: float
    iterations: int
    restart_index: int
    converged: bool
    seed: int
    status: str
    polish_evaluations: int = 0
    trace: tuple = field(default=(), repr=False)


@dataclass(frozen=True, eq=False)
class MultiStartResult:
    best: SearchResult
    results: list

    @property
    def success_fraction(self):
        """Share of restarts that reached a certified global minimum"""
        return sum(result.converged for result in self.results) / len(self.results)


def global_minimum(d: int) -> float:
    """min f = 1 + (d^2 - 1)/(d + 1)^2 = 2d/(d + 1)"""
    return 2 * d / (d + 1)


def _check_match(fiducial, basis):
    if fiducial.d != basis.d:
        raise DomainError(
            f"Fiducial dimension {fiducial.d} does not match basis dimension {basis.d}",
            details={"fiducial_d": fiducial.d, "basis_d": basis.d},
        )


def _project(amplitudes, vector):
    """Component of vector tangent to the sphere and orthogonal to the phase direction"""
    return vector - np.vdot(amplitudes, vector) * amplitudes


def _inner(a, b):
    return float(np.real(np.vdot(a, b)))


def _weighted_gradient(amplitudes, ops, weights, overlaps, shifted):
    """2 * sum_g w_g (conj(c_g) U_g phi + c_g U_g^dag phi), projected"""
    adjoint = np.einsum('gji,j->gi', ops.conj(), amplitudes)
    wirtinger = (weights * np.conj(overlaps)) @ shifted + (weights * overlaps) @ adjoint
    return _project(amplitudes, 2 * wirtinger)


def objective(fiducial: Fiducial, basis: ErrorBasis) -> float:
    _check_match(fiducial, basis)
    overlaps = (basis.ops @ fiducial.amplitudes) @ fiducial.amplitudes.conj()
    return float(np.sum(np.abs(overlaps) ** 4))


def gradient(fiducial: Fiducial, basis: ErrorBasis) -> np.ndarray:
    """
    Gradient of f restricted to the unit sphere, as a complex vector whose
    real and imaginary parts are the partial derivatives along the real and
    imaginary parts of each amplitude (twice the Wirtinger derivative with
    respect to the conjugate amplitudes).
    """
    _check_match(fiducial, basis)
    amplitudes = fiducial.amplitudes
    shifted = basis.ops @ amplitudes
    overlaps = shifted @ amplitudes.conj()
    weights = 2 * np.abs(overlaps) ** 2
    return _weighted_gradient(amplitudes, basis.ops, weights, overlaps, shifted)


class _GapFunction:
    def __init__(self, basis):
        self.ops = basis.ops
        self.others = np.ones(basis.n, dtype=bool)
        self.others[basis.identity_index] = False
        self.target = 1.0 / (basis.d + 1)

    def _excess(self, overlaps):
        return np.where(self.others, np.abs(overlaps) ** 2 - self.target, 0.0)

    def value(self, amplitudes):
        excess = self._excess((self.ops @ amplitudes) @ amplitudes.conj())
        return float(excess @ excess)

    def value_and_gradient(self, amplitudes):
        shifted = self.ops @ amplitudes
        overlaps = shifted @ amplitudes.conj()
        excess = self._excess(overlaps)
        grad = _weighted_gradient(amplitudes, self.ops, 2 * excess, overlaps, shifted)
        return float(excess @ excess), grad


def _retract(vector):
    return vector / np.linalg.norm(vector)


class _OverlapResiduals:
    """
    Residuals r_g = |<phi|U_g|phi>|^2 - 1/(d+1) for g != e plus <phi|phi> - 1,
    over the real coordinates x = (Re phi, Im phi). Their common zeros are
    exactly the normalized SIC fiducials.
    """

    def __init__(self, basis):
        others = np.ones(basis.n, dtype=bool)
        others[basis.identity_index] = False
        self.ops = basis.ops[others]
        self.d = basis.d
        self.target = 1.0 / (basis.d + 1)

    def split(self, x):
        return x[:self.d] + 1j * x[self.d:]

    def __call__(self, x):
        phi = self.split(x)
        overlaps = (self.ops @ phi) @ phi.conj()
        return np.append(np.abs(overlaps) ** 2 - self.target, np.vdot(phi, phi).real - 1.0)

    def jacobian(self, x):
        phi = self.split(x)
        shifted = self.ops @ phi
        adjoint = np.einsum('gji,j->gi', self.ops.conj(), phi)
        overlaps = shifted @ phi.conj()
        weights = 2 * np.conj(overlaps)[:, None]
        along_real = np.real(weights * (shifted + adjoint.conj()))
        along_imag = np.real(weights * 1j * (adjoint.conj() - shifted))
        return np.vstack([np.hstack([along_real, along_imag]), 2 * x])


def _polish(basis, amplitudes):
    """Levenberg-Marquardt on the overlap residuals; returns (unit vector, evaluations)"""
    residuals = _OverlapResiduals(basis)
    fit = least_squares(
        residuals, np.concatenate([amplitudes.real, amplitudes.imag]), jac=residuals.jacobian,
        method='lm', xtol=POLISH_TOL, ftol=POLISH_TOL, gtol=POLISH_TOL,
    )
    return _retract(residuals.split(fit.x)), int(fit.nfev)


def minimize(config: SearchConfig, start: Fiducial | None = None, *, restart_index: int = 0,
             seed: int | None = None) -> SearchResult:
    """
    Conjugate gradient from ``start`` (or a Haar-random point drawn from
    ``seed``). Directions follow Polak-Ribiere+ and reset to steepest
    descent every d iterations or whenever they stop descending; steps are
    backtracked until the Armijo condition holds and the iterate is
    renormalized after every step. Once the gap falls to POLISH_GAP the
    descent hands over to a Levenberg-Marquardt solve of the overlap
    residuals, which also converges where the minimum is degenerate (the
    d=3 continuum). ``trace`` holds the descent gaps only. Non-convergence
    is reported in the result, never raised.
    """
    basis = config.basis
    d = config.d
    seed = config.rng_seed if seed is None else seed
    if start is None:
        start = haar_random_fiducial(d, np.random.default_rng(seed))
    _check_match(start, basis)

    gap_function = _GapFunction(basis)
    amplitudes = start.amplitudes.copy()
    gap, grad = gap_function.value_and_gradient(amplitudes)
    direction = -grad
    step = INITIAL_MOVE / max(np.linalg.norm(direction), MIN_MOVE)
    trace = [gap]
    status = STATUS_MAX_ITERATIONS
    iterations = 0

    if np.linalg.norm(grad) <= config.gradient_tol:
        status = STATUS_GRADIENT
    elif gap <= POLISH_GAP:
        status = STATUS_OBJECTIVE
    else:
        for iterations in range(1, config.max_iterations + 1):
            slope = _inner(grad, direction)
            if slope >= 0:
                direction = -grad
                slope = -_inner(grad, grad)
            direction_norm = np.linalg.norm(direction)
            trial_step = min(2 * step, 1.0 / direction_norm)

            while trial_step * direction_norm >= MIN_MOVE:
                trial = _retract(amplitudes + trial_step * direction)
                trial_gap = gap_function.value(trial)
                if trial_gap <= gap + ARMIJO * trial_step * slope:
                    break
                trial_step *= SHRINK
            else:
                iterations -= 1
                status = STATUS_STALLED
                break

            step = trial_step
            new_gap, new_grad = gap_function.value_and_gradient(trial)
            transported_grad = _project(trial, grad)
            transported_direction = _project(trial, direction)
            grad_square = _inner(grad, grad)
            beta = 0.0
            if grad_square > 0:
                beta = max(0.0, _inner(new_grad, new_grad - transported_grad) / grad_square)
            direction = -new_grad + beta * transported_direction
            if iterations % d == 0:
                direction = -new_grad

            amplitudes, gap, grad = trial, new_gap, new_grad
            trace.append(gap)
            if iterations % 500 == 0:
                logger.debug(f"restart {restart_index}: iteration {iterations}, gap {gap:.3e}")
            if gap <= POLISH_GAP:
                status = STATUS_OBJECTIVE
                break
            if np.linalg.norm(grad) <= config.gradient_tol:
                status = STATUS_GRADIENT
                break

    polish_evaluations = 0
    if gap <= POLISH_GAP:
        polished, polish_evaluations = _polish(basis, amplitudes)
        polished_gap = gap_function.value(polished)
        if polished_gap < gap:
            amplitudes, gap = polished, polished_gap

    fiducial = Fiducial.from_vector(amplitudes, normalize=True, gauge=True)
    certificate = certify_sic(orbit(fiducial, basis), tol=config.sic_tol)
    converged = gap <= config.objective_tol and certificate.passed
    logger.debug(
        f"restart {restart_index} (seed {seed}) finished: status={status}, "
        f"iterations={iterations}, polish_evaluations={polish_evaluations}, gap={gap:.3e}, "
        f"sic_deviation={certificate.max_overlap_error:.3e}"
    )
    return SearchResult(
        fiducial=fiducial,
        objective=objective(fiducial, basis),
        global_min=global_minimum(d),
        gap=gap,
        sic_deviation=certificate.max_overlap_error,
        iterations=iterations,
        restart_index=restart_index,
        converged=converged,
        seed=seed,
        status=status,
        polish_evaluations=polish_evaluations,
        trace=tuple(trace),
    )


def restart_seeds(seed: int, count: int) -> list[int]:
    """Independent 63-bit seeds, the i-th derived from (seed, i)"""
    children = np.random.SeedSequence(seed).spawn(count)
    return [int(child.generate_state(1, dtype=np.uint64)[0]) & SEED_MASK for child in children]


def map_in_order(function, jobs, workers=1):
    """
    Yield function(job) for each job in job order, on a process pool when
    workers > 1. Closing the generator early terminates the pool.
    """
    if workers <= 1 or len(jobs) <= 1:
        for job in jobs:
            yield function(job)
        return
    with multiprocessing.Pool(min(workers, len(jobs))) as pool:
        yield from pool.imap(function, jobs)


def _run_restart(job):
    config, restart_index, seed = job
    return minimize(config, restart_index=restart_index, seed=seed)


def multi_start(config: SearchConfig, workers: int = 1, callback=None, quiet: bool = False) -> MultiStartResult:
    """
    Run ``config.restarts`` minimizations from independent Haar-random
    starts. Results come back in restart order whatever the number of
    workers, so serial and parallel runs agree exactly.

    ``quiet`` drops the summary and the no-convergence warning to DEBUG,
    for callers that run many searches and report on their own.
    """
    seeds = restart_seeds(config.rng_seed, config.restarts)
    jobs = [(config, index, seed) for index, seed in enumerate(seeds)]
    results = []
    for result in map_in_order(_run_restart, jobs, workers):
        results.append(result)
        if callback is not None:
            callback(result)
        if config.stop_on_success and result.converged:
            break

    best = min(results, key=lambda result: (result.gap, result.restart_index))
    outcome = MultiStartResult(best=best, results=results)
    logger.log(
        logging.DEBUG if quiet else logging.INFO,
        f"Multi-start d={config.d} seed={config.rng_seed}: {len(results)} restarts, "
        f"{outcome.success_fraction:.1%} converged, best gap {best.gap:.3e} "
        f"(restart {best.restart_index})"
    )
    if not best.converged:
        logger.log(
            logging.DEBUG if quiet else logging.WARNING,
            f"No restart converged for d={config.d} (best sic_deviation {best.sic_deviation:.3e})",
        )
    return outcome
