"""
Closed-form fiducial vectors for the Weyl-Heisenberg group in d = 2, 3, 4.

All surds are evaluated in double precision from their closed forms.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .exceptions import DomainError
from .wh_group import Fiducial

PARAM_TOL = 1e-12
TWO_PI = 2 * math.pi

# d = 3
D3_R0_MIN = 1 / math.sqrt(2)
D3_R0_MAX = math.sqrt(2 / 3)
D3_PHASES = (math.pi / 3, math.pi, 5 * math.pi / 3)
IDENTITY_PERMUTATION = (0, 1, 2)

# d = 4
D4_R_PLUS = 0.5 * math.sqrt(1 + 1 / math.sqrt(5) + math.sqrt(1 / 5 + 1 / math.sqrt(5)))
D4_R_MINUS = 0.5 * math.sqrt(1 + 1 / math.sqrt(5) - math.sqrt(1 / 5 + 1 / math.sqrt(5)))
# The closed form is usually printed as (1 - 1/sqrt5) / (2 sqrt(2 - sqrt2)),
# which leaves the column with squared norm ~0.876. The square root of the
# numerator is the value that makes r0^2 + r1^2 + r+^2 + r-^2 = 1.
D4_R0_PRINTED = (1 - 1 / math.sqrt(5)) / (2 * math.sqrt(2 - math.sqrt(2)))
D4_R0 = math.sqrt(1 - 1 / math.sqrt(5)) / (2 * math.sqrt(2 - math.sqrt(2)))
D4_R1 = (math.sqrt(2) - 1) * D4_R0
D4_A = math.acos(2 / math.sqrt(5 + math.sqrt(5)))
D4_B = math.asin(2 / math.sqrt(5))


@dataclass(frozen=True)
class D3Params:
    """
    Main family: r0 with theta1, theta2 from {pi/3, pi, 5pi/3}.
    Setting ``boundary`` to a phase selects the (1, e^(i theta), 0)/sqrt2 family
    instead, and r0/theta1/theta2 are ignored.
    """
    r0: float | None = D3_R0_MAX
    theta1: float = math.pi
    theta2: float = math.pi
    perm: tuple = IDENTITY_PERMUTATION
    boundary: float | None = None


@dataclass(frozen=True)
class D4Params:
    j: int = 0
    k: int = 0
    m: int = 0
    n: int = 0
    swap: bool = False
    cycle: int = 0


def fiducial_d2(which: int) -> Fiducial:
    """The two qubit fiducials, exactly as printed (the second has theta_0 = pi)"""
    if which == 0:
        column = [math.sqrt(3 + math.sqrt(3)), np.exp(1j * math.pi / 4) * math.sqrt(3 - math.sqrt(3))]
    elif which == 1:
        column = [-math.sqrt(3 - math.sqrt(3)), np.exp(1j * math.pi / 4) * math.sqrt(3 + math.sqrt(3))]
    else:
        raise DomainError(f"d=2 has two fiducials (0 or 1), got {which}", details={"which": which})
    return Fiducial(d=2, amplitudes=np.array(column) / math.sqrt(6))


def bloch_vector(fiducial: Fiducial) -> np.ndarray:
    if fiducial.d != 2:
        raise DomainError(f"Bloch vectors are defined for d=2, got d={fiducial.d}")
    a, b = fiducial.amplitudes
    cross = np.conj(a) * b
    return np.array([2 * cross.real, 2 * cross.imag, abs(a) ** 2 - abs(b) ** 2])


def d3_radii(r0: float) -> tuple[float, float]:
    """r_+/- = r0/2 +/- sqrt(2 - 3 r0^2)/2"""
    if not (D3_R0_MIN < r0 <= D3_R0_MAX + PARAM_TOL):
        raise DomainError(
            f"r0 must lie in (1/sqrt2, sqrt(2/3)], got {r0}",
            details={"r0": r0, "min": D3_R0_MIN, "max": D3_R0_MAX},
        )
    root = math.sqrt(max(2 - 3 * r0 * r0, 0.0))
    return 0.5 * r0 + 0.5 * root, 0.5 * r0 - 0.5 * root


def _is_d3_phase(theta):
    reduced = theta % TWO_PI
    return any(min(abs(reduced - phase), TWO_PI - abs(reduced - phase)) <= 1e-9
               for phase in D3_PHASES)


def _permute(column, perm):
    perm = tuple(perm)
    if sorted(perm) != list(range(len(column))):
        raise DomainError(f"{perm} is not a permutation of {len(column)} elements",
                          details={"perm": list(perm)})
    return np.array([column[p] for p in perm])


def fiducial_d3(params: D3Params) -> Fiducial:
    if params.boundary is not None:
        if not math.isfinite(params.boundary):
            raise DomainError(f"Boundary phase must be finite, got {params.boundary}")
        theta = params.boundary % TWO_PI
        column = [1 / math.sqrt(2), np.exp(1j * theta) / math.sqrt(2), 0.0]
        return Fiducial(d=3, amplitudes=_permute(column, params.perm))

    r0 = D3_R0_MAX if params.r0 is None else params.r0
    r_plus, r_minus = d3_radii(r0)
    r0 = min(r0, D3_R0_MAX)
    for name in ('theta1', 'theta2'):
        theta = getattr(params, name)
        if not _is_d3_phase(theta):
            raise DomainError(
                f"{name} must be one of pi/3, pi, 5pi/3, got {theta}",
                details={name: theta},
            )
    column = [r0, r_plus * np.exp(1j * params.theta1), r_minus * np.exp(1j * params.theta2)]
    return Fiducial(d=3, amplitudes=_permute(column, params.perm))


def _distinct(fiducials):
    unique = []
    for fiducial in fiducials:
        if not any(np.allclose(fiducial.amplitudes, other.amplitudes, rtol=0, atol=1e-14)
                   for other in unique):
            unique.append(fiducial)
    return unique


def d3_family(r0: float) -> list[Fiducial]:
    """Every main-family fiducial at one r0 (all phase pairs, all permutations)"""
    fiducials = [
        fiducial_d3(D3Params(r0=r0, theta1=theta1, theta2=theta2, perm=perm))
        for theta1, theta2 in itertools.product(D3_PHASES, repeat=2)
        for perm in itertools.permutations(range(3))
    ]
    return _distinct(fiducials)


def d3_boundary_family(theta: float) -> list[Fiducial]:
    return _distinct([
        fiducial_d3(D3Params(boundary=theta, perm=perm))
        for perm in itertools.permutations(range(3))
    ])


def d4_phases(j: int, k: int, m: int, n: int) -> tuple[float, float, float]:
    """(theta_+, theta_1, theta_-) for one element of the phase set"""
    if j not in (0, 1) or k not in (0, 1) or m not in (0, 1) or n not in range(4):
        raise DomainError(
            f"Need j, k, m in {{0, 1}} and n in 0..3, got j={j}, k={k}, m={m}, n={n}",
            details={"j": j, "k": k, "m": m, "n": n},
        )
    sign = (-1) ** m
    theta_plus = sign * (D4_A / 2 + D4_B / 4) + math.pi * (m + 2 * n + 7 * j + 1) / 4
    theta_one = math.pi * (2 * k + 1) / 2
    theta_minus = sign * (-D4_A / 2 + D4_B / 4) + math.pi * (m + 2 * n + 3 * j + 4 * k + 1) / 4
    return theta_plus, theta_one, theta_minus


def fiducial_d4(params: D4Params) -> Fiducial:
    theta_plus, theta_one, theta_minus = d4_phases(params.j, params.k, params.m, params.n)
    if params.cycle not in range(4):
        raise DomainError(f"cycle must be in 0..3, got {params.cycle}", details={"cycle": params.cycle})
    plus = D4_R_PLUS * np.exp(1j * theta_plus)
    one = D4_R1 * np.exp(1j * theta_one)
    minus = D4_R_MINUS * np.exp(1j * theta_minus)
    column = [D4_R0, minus, one, plus] if params.swap else [D4_R0, plus, one, minus]
    return Fiducial(d=4, amplitudes=np.roll(np.array(column), params.cycle))


def d4_family() -> list[Fiducial]:
    """All 256 fiducials: 32 phase triples x 2 columns x 4 cyclic shifts"""
    return [
        fiducial_d4(D4Params(j=j, k=k, m=m, n=n, swap=swap, cycle=cycle))
        for j, k, m, n in itertools.product((0, 1), (0, 1), (0, 1), range(4))
        for swap in (False, True)
        for cycle in range(4)
    ]
