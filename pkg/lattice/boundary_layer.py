"""Boundary-layer energies of a half-infinite chain and the crack energy.

A half chain has bonds b^1, b^2, ... (u^0 = 0, u^s - u^{s-1} = b^s) that
return to the ground strain gamma after a finite truncation index N. Two
layer functionals are minimized over b^1..b^N:

* B, the functional built on the splitting psi_j = J_j + c_j J_1;
* B~, the splitting-free functional sum_i [sum_j J_j(mean) - J_CB(gamma)].

Both give the same crack energy beta = 2B - sum_{j>=2} j psi_j(gamma)
= 2B~ - sum_{j>=1} j J_j(gamma); ``beta`` computes both and insists they
agree. For next-to-nearest neighbours (K = 2) the layer is written in the
offsets r^i = b^i - gamma, where its equilibrium equations and geometric
decay are checked.
"""
import logging
from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import List, Optional, Tuple

import numpy as np

from .conf import lattice_settings, resolve
from .constants import (
    BETA_ROUTES_ERROR, K2_ONLY_ERROR, K_AT_LEAST_2_ERROR, NOT_CONVERGED_ERROR
)
from .exceptions import ConsistencyError, InputError, UnsupportedError
from .optim import Objective, minimize

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class LayerProfile:
    N: int
    r: np.ndarray
    value: float
    residuals: np.ndarray
    converged: bool = True
    history: Tuple[Tuple[int, float], ...] = ()


@dataclass(frozen=True)
class BetaReport:
    beta: float
    beta_tilde: float
    discrepancy: float
    B: Optional[float]
    B_tilde: float
    N: int
    converged: bool
    route: str
    profile: Optional[LayerProfile] = None
    profile_tilde: Optional[LayerProfile] = None


@dataclass
class DecayReport:
    lam: float
    C_const: float
    alpha_lb: float
    violations: List[int] = field(default_factory=list)
    monotone_violations: List[int] = field(default_factory=list)
    window_violations: List[int] = field(default_factory=list)

    @property
    def certified(self):
        return not (self.violations or self.monotone_violations
                    or self.window_violations)


def _pad(fam, model, bonds):
    bonds = np.asarray(bonds, dtype=float)
    if bonds.ndim != 1 or bonds.size < fam.K:
        raise InputError(f'Layer needs at least K={fam.K} bonds')
    return np.concatenate((bonds, np.full(fam.K - 1, model.gamma)))


def _window_terms(fam, model, padded, N, j, grad):
    """sum_{i<N} [J_j(mean of b^{i+1..i+j}) - J_j(gamma)], grad added in."""
    mean = np.convolve(padded, np.ones(j) / j, mode='valid')[:N]
    value = float(np.sum(fam.evaluate(j, mean)
                         - fam.evaluate(j, model.gamma)))
    force = fam.derivative(j, mean) / j
    grad += np.convolve(force, np.ones(j))[:grad.size]
    return value


def layer_energy_generalK(fam, model, bonds):
    """Truncated B functional and its gradient in b^1..b^N."""
    if fam.K < 2:
        raise UnsupportedError(K_AT_LEAST_2_ERROR)
    padded = _pad(fam, model, bonds)
    N = padded.size - fam.K + 1
    if np.any(padded <= 0):
        return np.inf, np.zeros(N)
    grad = np.zeros(N)
    J1 = fam.evaluate(1, padded)
    dJ1 = fam.derivative(1, padded)
    J1_gamma = fam.evaluate(1, model.gamma)

    total = 0.0
    for j in range(2, fam.K + 1):
        c = model.c_j(j)
        weights = c * (j - np.arange(1, j + 1)) / j
        total += float(np.dot(weights, J1[:j]))
        grad[:j] += weights * dJ1[:j]

        total += _window_terms(fam, model, padded, N, j, grad)
        excess = np.convolve(J1 - J1_gamma, np.ones(j), mode='valid')[:N]
        total += c / j * float(np.sum(excess))
        hits = np.convolve(np.ones(N), np.ones(j))[:N]
        grad += c / j * hits * dJ1[:N]
    return total, grad


def layer_energy_tilde(fam, model, bonds):
    """Truncated B~ functional and its gradient in b^1..b^N."""
    padded = _pad(fam, model, bonds)
    N = padded.size - fam.K + 1
    if np.any(padded <= 0):
        return np.inf, np.zeros(N)
    grad = np.zeros(N)
    total = sum(_window_terms(fam, model, padded, N, j, grad)
                for j in fam.orders)
    return total, grad


def pair_energy_F(fam, model, a, b):
    """F(a, b) = J_2(gamma + (a+b)/2) + (J_1(gamma+a) + J_1(gamma+b))/2
    - J_CB(gamma); nonnegative and zero only at a = b = 0."""
    if fam.K != 2:
        raise UnsupportedError(K2_ONLY_ERROR)
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    gamma = model.gamma
    return (fam.evaluate(2, gamma + 0.5 * (a + b))
            + 0.5 * (fam.evaluate(1, gamma + a) + fam.evaluate(1, gamma + b))
            - model.jcb_at_gamma)


def layer_energy_nnn(fam, model, r):
    """B_gamma(r) = J_1(gamma + r^1) / 2 + sum_i F(r^i, r^{i+1}), K = 2."""
    if fam.K != 2:
        raise UnsupportedError(K2_ONLY_ERROR)
    r = np.asarray(r, dtype=float)
    nxt = np.append(r[1:], 0.0)
    return float(0.5 * fam.evaluate(1, model.gamma + r[0])
                 + np.sum(pair_energy_F(fam, model, r, nxt)))


def _schedule(fam, N_max):
    N = 2 * fam.K
    if N_max < 4 * fam.K:
        raise InputError(f'N_max={N_max} must be at least 4K')
    while N <= N_max:
        yield N
        N *= 2


def _solve_layer(fam, model, functional, starts, N_max, tol, gtol, label):
    N_max = resolve(N_max, 'LAYER_N_MAX')
    tol = resolve(tol, 'LAYER_TOL') * fam.energy_scale
    gtol = resolve(gtol, 'LAYER_GTOL')
    max_iter = resolve(None, 'LAYER_MAX_ITER')
    scale = fam.energy_scale
    gamma = model.gamma

    def evaluate(b):
        value, grad = functional(fam, model, b)
        return value / scale, grad / scale

    history = []
    previous = None
    best = None
    converged = False
    for N in _schedule(fam, N_max):
        objective = Objective(dimension=N, evaluate=evaluate)
        candidates = list(starts(N))
        if best is not None:
            warm = np.full(N, gamma)
            warm[:best.size] = best
            candidates.append(warm)
        values = []
        for b0 in candidates:
            start_value, _ = evaluate(b0)
            if not np.isfinite(start_value):
                continue
            report = minimize(objective, b0, gtol=gtol, max_iter=max_iter)
            b = report.x_star if report.f_star <= start_value else b0
            values.append((functional(fam, model, b)[0], b))
        value, b = min(values, key=lambda pair: pair[0])
        best = b
        history.append((N, float(value)))
        logger.debug('%s truncation N=%d: %.17g', label, N, value)
        if previous is not None and abs(value - previous) < tol:
            converged = True
            break
        previous = value

    _, residuals = functional(fam, model, best)
    profile = LayerProfile(
        N=best.size, r=best - gamma, value=float(history[-1][1]),
        residuals=residuals, converged=converged, history=tuple(history)
    )
    if not converged:
        logger.warning(NOT_CONVERGED_ERROR.format(N=best.size))
    return profile.value, profile


def _layer_starts(fam, model):
    gamma = model.gamma

    def starts(N):
        relaxed = np.full(N, gamma)
        relaxed[0] = fam.delta1
        return [np.full(N, gamma), relaxed]
    return starts


def solve_B(fam, model, N_max=None, tol=None, gtol=None):
    """Minimize the B functional over growing truncations N = 2K, 4K, ...

    Stops once two successive truncations agree to ``tol``; otherwise the
    returned profile has ``converged=False``.
    """
    if fam.K < 2:
        raise UnsupportedError(K_AT_LEAST_2_ERROR)
    return _solve_layer(fam, model, layer_energy_generalK,
                        _layer_starts(fam, model), N_max, tol, gtol, 'B')


def solve_B_tilde(fam, model, N_max=None, tol=None, gtol=None):
    return _solve_layer(fam, model, layer_energy_tilde,
                        _layer_starts(fam, model), N_max, tol, gtol, 'B~')


@lru_cache(maxsize=32)
def _beta(fam, model, N_max, tol, gtol, route_tol, settings_key):
    gamma = model.gamma
    B_tilde, tilde_profile = solve_B_tilde(fam, model, N_max, tol, gtol)
    beta_tilde = 2.0 * B_tilde - sum(
        j * fam.evaluate(j, gamma) for j in fam.orders
    )
    if fam.K == 1:
        return BetaReport(
            beta=float(beta_tilde), beta_tilde=float(beta_tilde),
            discrepancy=0.0, B=None, B_tilde=B_tilde, N=tilde_profile.N,
            converged=tilde_profile.converged, route='tilde',
            profile_tilde=tilde_profile,
        )

    B, profile = solve_B(fam, model, N_max, tol, gtol)
    beta_direct = 2.0 * B - sum(
        j * model.psi_at_gamma[j - 2] for j in range(2, fam.K + 1)
    )
    discrepancy = abs(beta_direct - beta_tilde)
    if discrepancy > route_tol * fam.energy_scale:
        raise ConsistencyError(BETA_ROUTES_ERROR.format(
            direct=float(beta_direct), tilde=float(beta_tilde)
        ))
    return BetaReport(
        beta=float(beta_direct), beta_tilde=float(beta_tilde),
        discrepancy=float(discrepancy), B=B, B_tilde=B_tilde, N=profile.N,
        converged=profile.converged and tilde_profile.converged,
        route='direct', profile=profile, profile_tilde=tilde_profile,
    )


def beta(fam, model, N_max=None, tol=None):
    """Crack energy beta through both layer functionals.

    Raises ConsistencyError when the two routes disagree beyond
    ``BETA_ROUTE_TOL``. With K = 1 there is no splitting and only the
    splitting-free route exists.
    """
    report = _beta(fam, model, resolve(N_max, 'LAYER_N_MAX'),
                   resolve(tol, 'LAYER_TOL'), resolve(None, 'LAYER_GTOL'),
                   resolve(None, 'BETA_ROUTE_TOL'),
                   lattice_settings.snapshot())
    logger.info('beta=%.12g (route %s, discrepancy %.3g, N=%d)',
                report.beta, report.route, report.discrepancy, report.N)
    return report


def equilibrium_residuals(fam, model, profile):
    """Residuals of the K = 2 layer equilibrium equations, r^{N+1} = 0."""
    if fam.K != 2:
        raise UnsupportedError(K2_ONLY_ERROR)
    gamma = model.gamma
    r = np.asarray(getattr(profile, 'r', profile), dtype=float)
    padded = np.concatenate((r, [0.0]))
    pair = 0.5 * fam.derivative(2, gamma + 0.5 * (padded[:-1] + padded[1:]))
    residuals = fam.derivative(1, gamma + r) + pair
    residuals[1:] += pair[:-1]
    return residuals


def certify_decay(fam, model, profile, points=None):
    """Check r^1 >= r^2 >= ... >= 0, r^i <= lam^{i-1} r^1 and
    gamma + r^i in (zc2, zc3) for a K = 2 layer minimizer.

    lam = C / (alpha_lb + C), with C = max -J_2''(gamma + t) and
    alpha_lb = min J_CB''(gamma + t) for t between 0 and r^1.
    """
    if fam.K != 2:
        raise UnsupportedError(K2_ONLY_ERROR)
    points = resolve(points, 'DECAY_GRID_POINTS')
    atol = resolve(None, 'DECAY_ATOL')
    mono_atol = resolve(None, 'MONOTONE_ATOL')
    gamma = model.gamma
    r = np.asarray(getattr(profile, 'r', profile), dtype=float)

    t = np.linspace(min(0.0, r[0]), max(0.0, r[0]), points)
    C_const = float(np.max(-fam.derivative(2, gamma + t, 2)))
    alpha_lb = float(np.min(fam.cauchy_born_derivative(gamma + t, 2)))
    lam = C_const / (alpha_lb + C_const)
    report = DecayReport(lam=lam, C_const=C_const, alpha_lb=alpha_lb)

    bound = lam ** np.arange(r.size) * r[0]
    report.violations = [int(i) + 1 for i in
                         np.flatnonzero(r > bound + atol)]
    nxt = np.append(r[1:], 0.0)
    report.monotone_violations = [
        int(i) + 1 for i in np.flatnonzero((r - nxt < -mono_atol)
                                           | (r < -mono_atol))
    ]
    marks = fam.landmarks()
    strain = gamma + r
    report.window_violations = [
        int(i) + 1 for i in np.flatnonzero((strain <= marks.zc2)
                                           | (strain >= marks.zc3))
    ]
    if not report.certified:
        logger.warning('Decay certificate fails: geometric %s, monotone %s, '
                       'window %s', report.violations,
                       report.monotone_violations, report.window_violations)
    return report


def decay_rows(profile, report):
    """(i, r^i, lam^{i-1} r^1, residual^i) rows of a certified layer."""
    r = profile.r
    bound = report.lam ** np.arange(r.size) * r[0]
    return [(i + 1, r[i], bound[i], profile.residuals[i])
            for i in range(r.size)]


def with_residuals(fam, model, profile):
    """The profile with its residuals replaced by the K = 2 equations."""
    return replace(profile,
                   residuals=equilibrium_residuals(fam, model, profile))
