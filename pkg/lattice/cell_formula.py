"""Cell problem phi_N(z) with clamped boundary strains.

The cell holds N + 1 atoms u^0..u^N; the first and last K + 1 atoms sit on
the affine profile u^i = z i and the interior is relaxed.
"""
import logging
from dataclasses import dataclass
from typing import List

import numpy as np

from .conf import resolve
from .constants import INFEASIBLE_START_ERROR, MAX_CELL_SIZE
from .effective_density import jcb_star_star, psi_star_star
from .exceptions import InputError
from .optim import Objective, minimize

logger = logging.getLogger(__name__)

AFFINE = 'affine'
CRACKED = 'cracked'


@dataclass(frozen=True)
class CellSolution:
    N: int
    z: float
    value: float
    profile: np.ndarray
    start_kind: str
    converged: bool = True


@dataclass(frozen=True)
class ConvergenceRow:
    N: int
    z: float
    phi_N: float
    jcb_star_star: float
    abs_error: float


@dataclass(frozen=True)
class ConvergenceTable:
    z: float
    rows: List[ConvergenceRow]
    trend: float
    monotone: bool


def cell_energy(fam, u):
    """Sum_j sum_i J_j((u^{i+j} - u^i) / j) and its gradient in u."""
    u = np.asarray(u, dtype=float)
    grad = np.zeros_like(u)
    total = 0.0
    for j in fam.orders:
        strain = (u[j:] - u[:-j]) / j
        if np.any(strain <= 0):
            return np.inf, grad
        total += float(np.sum(fam.evaluate(j, strain)))
        force = fam.derivative(j, strain) / j
        grad[j:] += force
        grad[:-j] -= force
    return total, grad


def affine_profile(N, z):
    return z * np.arange(N + 1, dtype=float)


def cracked_profile(fam, model, N, z):
    """Ground-state gaps gamma in the interior, one crack before u^{N-K}."""
    K = fam.K
    u = affine_profile(N, z)
    interior = np.arange(K, N - K)
    u[interior] = K * z + model.gamma * (interior - K)
    return u


def _check_size(fam, N):
    if N < 2 * fam.K + 2:
        raise InputError(f'Cell size N={N} must be at least 2K + 2')
    if N > MAX_CELL_SIZE:
        raise InputError(f'Cell size N={N} exceeds {MAX_CELL_SIZE}')


def solve_phi(fam, model, N, z, gtol=None, max_iter=None):
    """phi_N(z): minimum of the mean cell energy over the free interior.

    Runs from the affine profile and, for z > gamma, from the cracked
    profile; the lower of all starts and their relaxations is returned.
    """
    _check_size(fam, N)
    gtol = resolve(gtol, 'CELL_GTOL')
    max_iter = resolve(max_iter, 'CELL_MAX_ITER')
    K = fam.K
    free = slice(K + 1, N - K)
    scale = fam.energy_scale

    def evaluate(x, base):
        u = base.copy()
        u[free] = x
        total, grad = cell_energy(fam, u)
        return total / scale, grad[free] / scale

    starts = [(AFFINE, affine_profile(N, z))]
    if z > model.gamma:
        starts.append((CRACKED, cracked_profile(fam, model, N, z)))

    best = None
    for kind, u0 in starts:
        start_value, _ = cell_energy(fam, u0)
        if not np.isfinite(start_value):
            continue
        objective = Objective(
            dimension=N - 2 * K - 1,
            evaluate=lambda x, base=u0: evaluate(x, base)
        )
        report = minimize(objective, u0[free], gtol=gtol, max_iter=max_iter)
        profile = u0.copy()
        converged = report.converged
        if report.f_star * scale <= start_value:
            profile[free] = report.x_star
        else:
            converged = False
        value, _ = cell_energy(fam, profile)
        candidate = CellSolution(
            N=N, z=float(z), value=value / N, profile=profile,
            start_kind=kind, converged=converged
        )
        logger.debug('phi_N start %s: N=%d z=%.6g value=%.17g', kind, N, z,
                     candidate.value)
        if best is None or candidate.value < best.value:
            best = candidate
    if best is None:
        raise InputError(INFEASIBLE_START_ERROR)
    if not best.converged:
        logger.warning('phi_N(%.6g) with N=%d did not reach gtol=%g', z, N,
                       gtol)
    return best


def upper_bound(fam, z, N):
    """Energy of the affine profile, J_CB(z) - (1/N) sum_j (j-1) J_j(z)."""
    return float(fam.cauchy_born(z) - sum(
        (j - 1) * fam.evaluate(j, z) for j in fam.orders
    ) / N)


def lower_bound(fam, model, z, N):
    """sum_j (1 - (j-1)/N) psi_j**(z) + C/N, C = sum_j c_j (j-1) J_1(delta_1).

    Needs K >= 2; for K = 1 the bound degenerates to J_1**(z).
    """
    if fam.K == 1:
        return float(jcb_star_star(model, z))
    delta1_energy = fam.evaluate(1, fam.delta1)
    C = sum(model.c_j(j) * (j - 1) * delta1_energy
            for j in range(2, fam.K + 1))
    return float(sum(
        (1.0 - (j - 1) / N) * psi_star_star(model, j, z)
        for j in range(2, fam.K + 1)
    ) + C / N)


def phi_convergence(fam, model, z, N_list, gtol=None):
    N_list = [int(N) for N in N_list]
    if not N_list:
        raise InputError('N_list must not be empty')
    if any(b <= a for a, b in zip(N_list, N_list[1:])):
        raise InputError('N_list must be strictly increasing')
    target = float(jcb_star_star(model, z))
    rows = []
    for N in N_list:
        solution = solve_phi(fam, model, N, z, gtol=gtol)
        rows.append(ConvergenceRow(
            N=N, z=float(z), phi_N=solution.value, jcb_star_star=target,
            abs_error=abs(solution.value - target)
        ))

    # Least-squares fit of abs_error ~ c / N.
    inverse = np.array([1.0 / row.N for row in rows])
    errors = np.array([row.abs_error for row in rows])
    trend = float(np.dot(inverse, errors) / np.dot(inverse, inverse))
    slack = 10.0 * resolve(gtol, 'CELL_GTOL') * fam.energy_scale
    monotone = bool(np.all(np.diff(errors) <= slack))
    if not monotone:
        logger.info('phi_N errors at z=%.6g are not monotone in N: %s', z,
                    errors)
    return ConvergenceTable(z=float(z), rows=rows, trend=trend,
                            monotone=monotone)
