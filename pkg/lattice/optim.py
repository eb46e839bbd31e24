"""Unconstrained minimization of extended-real objectives.

Objectives return ``(energy, gradient)``; a non-finite energy marks a point
outside the domain. Line searches treat such trial points as rejected steps,
so every solver here is agnostic of the potential it minimizes.
"""
import logging
import math
from collections import deque
from dataclasses import dataclass
from typing import Callable, Tuple

import numpy as np

from .conf import resolve
from .constants import INFEASIBLE_START_ERROR
from .exceptions import InputError

logger = logging.getLogger(__name__)

INV_PHI = (math.sqrt(5) - 1) / 2  # 1 / phi
INV_PHI_SQUARE = (3 - math.sqrt(5)) / 2  # 1 / phi^2


@dataclass(frozen=True)
class Objective:
    dimension: int
    evaluate: Callable[[np.ndarray], Tuple[float, np.ndarray]]

    def __call__(self, x):
        return self.evaluate(x)


@dataclass(frozen=True)
class SolveReport:
    x_star: np.ndarray
    f_star: float
    grad_norm: float
    iterations: int
    converged: bool
    message: str = ''
    rise: float = 0.0


def _two_loop(gradient, history):
    """L-BFGS two-loop recursion: approximate -H^{-1} g."""
    q = gradient.copy()
    alphas = []
    for s, y, rho in reversed(history):
        a = rho * np.dot(s, q)
        alphas.append(a)
        q -= a * y
    if history:
        s, y, _ = history[-1]
        q *= np.dot(s, y) / np.dot(y, y)
    for (s, y, rho), a in zip(history, reversed(alphas)):
        b = rho * np.dot(y, q)
        q += (a - b) * s
    return -q


def minimize(objective, x0, gtol=None, max_iter=None, memory=None,
             armijo=None, backtrack=None, fnoise=None, callback=None,
             warn=True):
    """Limited-memory secant descent with a backtracking line search.

    Termination is on the max-norm of the gradient. Steps are accepted on
    the Armijo condition; once energy differences drop into round-off
    (below ``fnoise`` relative to the energy) a step is also accepted when
    the energy rises by no more than that allowance and the directional
    derivative shows no overshoot. Trial points with non-finite energy are
    rejected by shrinking the step.

    The last iterate is returned, so accepted energies are nonincreasing
    only up to the round-off allowance; ``SolveReport.rise`` records how far
    ``f_star`` sits above the lowest energy visited.

    ``callback(x, f)`` is called after every accepted iteration. With
    ``warn=False`` an unconverged run is logged at debug level only.
    """
    gtol = resolve(gtol, 'GTOL')
    max_iter = resolve(max_iter, 'MAX_ITER')
    memory = resolve(memory, 'LBFGS_MEMORY')
    armijo = resolve(armijo, 'ARMIJO')
    backtrack = resolve(backtrack, 'BACKTRACK')
    fnoise = resolve(fnoise, 'FNOISE')
    max_backtracks = resolve(None, 'MAX_BACKTRACKS')
    if gtol <= 0:
        raise InputError('gtol must be positive')

    x = np.array(x0, dtype=float)
    f, g = objective(x)
    if not np.isfinite(f):
        raise InputError(INFEASIBLE_START_ERROR)
    history = deque(maxlen=memory)
    grad_norm = float(np.max(np.abs(g))) if g.size else 0.0
    lowest = f
    iterations = 0
    message = 'gradient tolerance reached'

    while grad_norm > gtol:
        if iterations >= max_iter:
            message = 'iteration limit reached'
            break
        direction = _two_loop(g, history)
        slope = float(np.dot(g, direction))
        if not slope < 0:
            history.clear()
            direction = -g
            slope = -float(np.dot(g, g))
        step = 1.0 if history else min(1.0, 1.0 / grad_norm)

        allowance = fnoise * max(1.0, abs(f))
        accepted = False
        for _ in range(max_backtracks):
            trial = x + step * direction
            f_trial, g_trial = objective(trial)
            if np.isfinite(f_trial):
                if f_trial <= f + armijo * step * slope:
                    accepted = True
                elif (f_trial <= f + allowance
                      and abs(np.dot(g_trial, direction)) <= 0.9 * -slope):
                    accepted = True
                if accepted:
                    break
            step *= backtrack
        if not accepted:
            message = 'line search failed'
            break

        s = trial - x
        y = g_trial - g
        sy = float(np.dot(s, y))
        if sy > 1e-12 * float(np.dot(y, y)):
            history.append((s, y, 1.0 / sy))
        x, f, g = trial, f_trial, g_trial
        grad_norm = float(np.max(np.abs(g)))
        lowest = min(lowest, f)
        iterations += 1
        if callback is not None:
            callback(x, f)

    converged = grad_norm <= gtol
    log = logger.warning if warn and not converged else logger.debug
    log('minimize: %s after %d iterations (f=%.17g, |g|=%.3g)',
        message, iterations, f, grad_norm)
    return SolveReport(
        x_star=x, f_star=float(f), grad_norm=grad_norm,
        iterations=iterations, converged=converged, message=message,
        rise=float(f - lowest)
    )


def golden_section(f, bracket, xtol=None):
    """Golden-section search for the minimizer of a unimodal f on bracket.

    Returns ``(x_star, f_star)`` with |x_star - argmin| <= xtol for unimodal
    f, up to the resolution of the function values near the minimum.
    """
    xtol = resolve(xtol, 'GOLDEN_XTOL')
    a, b = bracket
    if not a < b:
        raise InputError('Bracket must satisfy lo < hi')
    h = b - a
    if h <= xtol:
        x = 0.5 * (a + b)
        return x, f(x)

    # Required steps to achieve tolerance
    n = int(math.ceil(math.log(xtol / h) / math.log(INV_PHI)))

    c = a + INV_PHI_SQUARE * h
    d = a + INV_PHI * h
    yc = f(c)
    yd = f(d)

    for _ in range(n):
        if yc < yd:
            b = d
            d = c
            yd = yc
            h = INV_PHI * h
            c = a + INV_PHI_SQUARE * h
            yc = f(c)
        else:
            a = c
            c = d
            yc = yd
            h = INV_PHI * h
            d = a + INV_PHI * h
            yd = f(d)

    if yc < yd:
        return c, yc
    return d, yd
