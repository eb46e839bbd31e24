"""Periodic chain energies H_n and E_n^l and their minimization.

Displacements are rescaled around the ground state: atom i of a chain with
n atoms per period sits at gamma i / n + v^i / sqrt(n), with v^0 = 0 and
v^{i+n} = v^i + l. The rescaled energy E_n^l is
sum_{i<n} sum_j [J_j(gamma + sqrt(n) (v^{i+j} - v^i) / j) - J_j(gamma)].
"""
import logging
import math
from dataclasses import dataclass, field
from typing import List

import numpy as np

from .conf import resolve
from .constants import (
    INFEASIBLE_START_ERROR, K_AT_LEAST_2_ERROR, MAX_CHAIN_SIZE
)
from .exceptions import InputError, UnsupportedError
from .optim import Objective, minimize

logger = logging.getLogger(__name__)

ELASTIC = 'elastic'
FRACTURED = 'fractured'


@dataclass(frozen=True)
class ChainState:
    n: int
    ell: float
    v: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.v, dtype=float)
        if v.shape != (self.n,):
            raise InputError(f'v must hold n={self.n} entries')
        if v[0] != 0.0:
            raise InputError('v^0 must be 0')
        object.__setattr__(self, 'v', v)

    @classmethod
    def from_free(cls, n, ell, free):
        return cls(n=n, ell=float(ell), v=np.concatenate(([0.0], free)))

    def extended(self, width):
        """v^0..v^{n-1+width} with the wrap v^{i+n} = v^i + l."""
        tail = self.v[:width] + self.ell
        return np.concatenate((self.v, tail))

    def gaps(self):
        """Single-bond jumps v^{i+1} - v^i, i = 0..n-1, wrap included."""
        return np.diff(self.extended(1))


@dataclass
class ChainSolveResult:
    state: ChainState
    energy: float
    classification: str
    max_gap: float
    predicted_limit: float
    start: str = ''
    notes: List[str] = field(default_factory=list)
    screened: List[str] = field(default_factory=list)


def _periodic_u(u, n, width):
    u = np.asarray(u, dtype=float)
    if u.shape != (n + 1,):
        raise InputError(f'u must hold n + 1 = {n + 1} entries')
    period = u[n] - u[0]
    return np.concatenate((u[:n], u[:width] + period))


def energy_bulk(fam, u, n):
    """H_n(u) = sum_j sum_{i<n} (1/n) J_j(n (u^{i+j} - u^i) / j)."""
    ext = _periodic_u(u, n, fam.K)
    total = 0.0
    for j in fam.orders:
        strain = n * (ext[j:j + n] - ext[:n]) / j
        total += float(np.sum(fam.evaluate(j, strain)))
    return total / n


def energy_rescaled(fam, model, state):
    """E_n^l(v) and its gradient over the free entries v^1..v^{n-1}."""
    n, K = state.n, fam.K
    root = math.sqrt(n)
    ext = state.extended(K)
    grad_ext = np.zeros_like(ext)
    total = 0.0
    for j in fam.orders:
        strain = model.gamma + root * (ext[j:j + n] - ext[:n]) / j
        if np.any(strain <= 0):
            return np.inf, np.zeros(n - 1)
        total += float(np.sum(fam.evaluate(j, strain)
                              - fam.evaluate(j, model.gamma)))
        force = fam.derivative(j, strain) * root / j
        grad_ext[j:j + n] += force
        grad_ext[:n] -= force
    grad = grad_ext[:n].copy()
    grad[:K] += grad_ext[n:]
    return total, grad[1:]


def zeta_terms(fam, model, state):
    """Per-site terms zeta_{j,i}, j = 2..K, whose total is E_n^l.

    zeta_{j,i} = J_j(gamma + d_j^i) + (c_j / j) sum_{s=i}^{i+j-1}
    J_1(gamma + d_1^s) - psi_j(gamma), each nonnegative.
    """
    if fam.K < 2:
        raise UnsupportedError(K_AT_LEAST_2_ERROR)
    n, K = state.n, fam.K
    root = math.sqrt(n)
    ext = state.extended(2 * K)
    bonds = fam.evaluate(1, model.gamma + root * np.diff(ext))
    terms = np.empty((K - 1, n))
    for j in range(2, K + 1):
        strain = model.gamma + root * (ext[j:j + n] - ext[:n]) / j
        window = np.convolve(bonds, np.ones(j), mode='valid')[:n]
        terms[j - 2] = (fam.evaluate(j, strain) + model.c_j(j) / j * window
                        - model.psi_at_gamma[j - 2])
    return terms


def affine_start(n, ell):
    return ell * np.arange(n, dtype=float) / n


def cracked_start(n, ell, m):
    """The whole stretch l as one jump across bond m -> m + 1."""
    v = np.zeros(n)
    v[m + 1:] = ell
    return v


def _predicted_limit(model, ell, beta_value):
    return min(model.alpha * ell * ell, beta_value)


def minimize_chain(fam, model, n, ell, beta_value=None, starts=None,
                   rng=None, gtol=None, max_iter=None, screen_iter=None):
    """Multi-start minimization of E_n^l.

    ``starts`` lists start kinds among ``affine``, ``cracked`` (three crack
    positions) and ``jitter`` (affine plus seeded noise, needs ``rng``).
    Starts run in the given order. The first runs to ``max_iter``; each later
    one first gets ``screen_iter`` iterations and is dropped if it is still
    above the best energy so far. Appending start kinds therefore never
    raises the returned energy.

    A chain counts as fractured when its largest bond jump exceeds l / 2.
    """
    if n < 8 * fam.K:
        raise InputError(f'Chain size n={n} must be at least 8K')
    if n > MAX_CHAIN_SIZE:
        raise InputError(f'Chain size n={n} exceeds {MAX_CHAIN_SIZE}')
    if ell < 0:
        raise InputError('ell must be nonnegative')
    gtol = resolve(gtol, 'CHAIN_GTOL')
    max_iter = resolve(max_iter, 'CHAIN_MAX_ITER')
    screen_iter = min(resolve(screen_iter, 'CHAIN_SCREEN_ITER'), max_iter)
    if beta_value is None:
        from .boundary_layer import beta
        beta_value = beta(fam, model).beta
    kinds = ('affine', 'cracked') if starts is None else tuple(starts)
    if 'jitter' in kinds and rng is None:
        rng = np.random.default_rng(0)

    candidates = []
    for kind in kinds:
        if kind == 'affine':
            candidates.append(('affine', affine_start(n, ell)))
        elif kind == 'cracked':
            for m in (n // 4, n // 2, 3 * n // 4):
                candidates.append((f'cracked@{m}', cracked_start(n, ell, m)))
        elif kind == 'jitter':
            noise = rng.normal(scale=1e-3 * max(ell, 1.0) / math.sqrt(n),
                               size=n)
            noise[0] = 0.0
            candidates.append(('jitter', affine_start(n, ell) + noise))
        else:
            raise InputError(f'Unknown start "{kind}"')

    scale = fam.energy_scale

    def evaluate(free):
        value, grad = energy_rescaled(fam, model,
                                      ChainState.from_free(n, ell, free))
        return value / scale, grad / scale

    objective = Objective(dimension=n - 1, evaluate=evaluate)
    results = {}
    screened = []
    best = np.inf
    for name, v0 in candidates:
        start_value, _ = evaluate(v0[1:])
        if not np.isfinite(start_value):
            logger.debug('Skipping infeasible start %s', name)
            continue
        if np.isfinite(best) and screen_iter < max_iter:
            report = minimize(objective, v0[1:], gtol=gtol,
                              max_iter=screen_iter, warn=False)
            if not report.converged and report.f_star >= best:
                logger.debug('Start %s screened out at %.10g >= %.10g',
                             name, report.f_star, best)
                screened.append(name)
                continue
            if not report.converged:
                report = minimize(objective, report.x_star, gtol=gtol,
                                  max_iter=max_iter - report.iterations)
        else:
            report = minimize(objective, v0[1:], gtol=gtol, max_iter=max_iter)
        best = min(best, report.f_star)
        free = report.x_star if report.f_star <= start_value else v0[1:]
        state = ChainState.from_free(n, ell, free)
        energy, _ = energy_rescaled(fam, model, state)
        results[name] = (energy, state, report.converged)
    if not results:
        raise InputError(INFEASIBLE_START_ERROR)

    name = min(results, key=lambda key: results[key][0])
    energy, state, converged = results[name]
    gaps = state.gaps()
    max_gap = float(np.max(gaps))
    result = ChainSolveResult(
        state=state, energy=float(energy),
        classification=FRACTURED if max_gap > ell / 2.0 and ell > 0
        else ELASTIC,
        max_gap=max_gap,
        predicted_limit=_predicted_limit(model, ell, beta_value),
        start=name, screened=screened,
    )
    if not converged:
        result.notes.append(f'start {name} stopped before gtol')
    affine = results.get('affine')
    if (affine is not None and name.startswith('cracked')
            and model.alpha * ell * ell < beta_value
            and energy < affine[0] - 1e-9 * scale):
        result.notes.append(
            'cracked start beats affine in the nominally elastic regime'
        )
        logger.warning('n=%d l=%.6g: cracked start %s beats affine '
                       '(%.6g < %.6g) although alpha l^2 < beta',
                       n, ell, name, energy, affine[0])
    return result


@dataclass(frozen=True)
class SweepRow:
    n: int
    ell: float
    energy: float
    normalized_energy: float
    classification: str
    predicted_limit: float
    relative_gap: float
    start: str


def sweep(fam, model, n_list, ell_grid, beta_value=None, rng=None,
          starts=None):
    if len(n_list) == 0 or len(ell_grid) == 0:
        raise InputError('Sweep grids must not be empty')
    if beta_value is None:
        from .boundary_layer import beta
        beta_value = beta(fam, model).beta
    rows = []
    for n in sorted(int(n) for n in n_list):
        for ell in sorted(float(ell) for ell in ell_grid):
            result = minimize_chain(fam, model, n, ell, beta_value=beta_value,
                                    starts=starts, rng=rng)
            predicted = result.predicted_limit
            gap = abs(result.energy - predicted) / max(predicted, 1e-3)
            rows.append(SweepRow(
                n=n, ell=ell, energy=result.energy,
                normalized_energy=result.energy / fam.energy_scale,
                classification=result.classification,
                predicted_limit=predicted, relative_gap=gap,
                start=result.start,
            ))
            logger.info('chain n=%d l=%.6g: E=%.10g (%s), predicted %.10g',
                        n, ell, result.energy, result.classification,
                        predicted)
    return rows
