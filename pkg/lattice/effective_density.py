"""Effective quantities of a Lennard-Jones family.

Everything here is a pure function of a ``PotentialFamily``; the ground
strain, the splitting coefficients and the envelopes are closed forms, the
numerical routines (``gamma_numeric``, ``inner_infimum``, ``convex_envelope``)
serve as independent cross-checks of them.
"""
import logging
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .conf import resolve
from .constants import ENVELOPE_MIN_POINTS
from .exceptions import InputError
from .optim import golden_section

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class EffectiveModel:
    family: object
    gamma: float
    c: Tuple[float, ...]
    alpha: float
    jcb_at_gamma: float
    psi_at_gamma: Tuple[float, ...]

    def c_j(self, j):
        """Splitting coefficient c_j, j = 2..K."""
        if not 2 <= j <= self.family.K:
            raise InputError(f'No splitting coefficient for j={j}')
        return self.c[j - 2]

    def psi(self, j, z):
        """psi_j(z) = J_j(z) + c_j J_1(z)."""
        return self.family.evaluate(j, z) + self.c_j(j) * \
            self.family.evaluate(1, z)

    def psi_derivative(self, j, z, order=1):
        fam = self.family
        return fam.derivative(j, z, order) + \
            self.c_j(j) * fam.derivative(1, z, order)


def build_model(fam):
    delta1 = fam.delta1
    orders = np.arange(1, fam.K + 1, dtype=float)
    s12 = float(np.sum(orders ** -12))
    s6 = float(np.sum(orders ** -6))
    gamma = delta1 * (s12 / s6) ** (1.0 / 6.0)
    if fam.K == 1:
        c = ()
    else:
        slope = fam.derivative(1, gamma)
        c = tuple(float(-fam.derivative(j, gamma) / slope)
                  for j in range(2, fam.K + 1))
    alpha = 0.5 * float(fam.cauchy_born_derivative(gamma, 2))
    psi_at_gamma = tuple(
        float(fam.evaluate(j, gamma) + c[j - 2] * fam.evaluate(1, gamma))
        for j in range(2, fam.K + 1)
    )
    model = EffectiveModel(
        family=fam, gamma=gamma, c=c, alpha=alpha,
        jcb_at_gamma=float(fam.cauchy_born(gamma)), psi_at_gamma=psi_at_gamma
    )
    logger.debug('Effective model for %s: gamma=%.17g alpha=%.17g c=%s',
                 fam, gamma, alpha, c)
    return model


def gamma_numeric(fam, xtol=None):
    """Minimizer of J_CB on [delta_1/4, 2 delta_1], found without the
    closed form.

    Golden-section search brackets the minimizer; J_CB is too flat there for
    the values alone to resolve it below ~1e-8, so the result is polished
    with safeguarded Newton steps on J_CB' = 0.
    """
    lo, hi = fam.delta1 / 4.0, 2.0 * fam.delta1
    z, _ = golden_section(fam.cauchy_born, (lo, hi), xtol)
    for _ in range(50):
        curvature = fam.cauchy_born_derivative(z, 2)
        if not curvature > 0:
            break
        step = fam.cauchy_born_derivative(z) / curvature
        candidate = z - step
        if not lo < candidate < hi:
            break
        z = candidate
        if abs(step) <= 1e-15 * z:
            break
    return float(z)


def _split_candidates(fam, j, z, points):
    """Best tuples with m large bonds and j - m equal small bonds."""
    total = j * z
    yield float(j * fam.evaluate(1, z)), (float(z),) * j
    for m in range(1, j):
        small = j - m
        upper = total / small
        grid = np.linspace(0.0, upper, points + 2)[1:-1]

        def energy(b, m=m, small=small):
            a = (total - small * b) / m
            return m * fam.evaluate(1, a) + small * fam.evaluate(1, b)

        values = energy(grid)
        k = int(np.argmin(values))
        lo = grid[k - 1] if k > 0 else 0.5 * grid[0]
        hi = grid[k + 1] if k + 1 < grid.size else 0.5 * (grid[-1] + upper)
        b, value = golden_section(energy, (lo, hi))
        if not value <= values[k]:
            b, value = grid[k], values[k]
        a = (total - small * b) / m
        yield float(value), (float(b),) * small + (float(a),) * m


def inner_infimum(fam, model, j, z, points=None):
    """inf { sum_s J_1(z_s) : z_1 + ... + z_j = j z }.

    Returns ``(value, argmin)``. Up to z = delta_1 the constant tuple is the
    minimizer; above it a minimizer takes at most two distinct values, so the
    search runs over the number of bonds at the larger value.
    """
    if not 1 <= j <= fam.K:
        raise InputError(f'j must lie in 1..{fam.K}')
    if not z > 0:
        return np.inf, ()
    if z <= fam.delta1:
        return float(j * fam.evaluate(1, z)), (float(z),) * j
    points = resolve(points, 'INNER_GRID_POINTS')
    return min(_split_candidates(fam, j, z, points), key=lambda pair: pair[0])


def j0j(fam, model, j, z):
    """J_{0,j}(z) = J_j(z) + (c_j / j) * inner infimum, +inf for z <= 0."""
    if not z > 0:
        return np.inf
    value, _ = inner_infimum(fam, model, j, z)
    return float(fam.evaluate(j, z) + model.c_j(j) / j * value)


@dataclass(frozen=True)
class EnvelopeTable:
    grid: np.ndarray
    values: np.ndarray
    kink: float
    raw: Optional[np.ndarray] = None

    def rows(self):
        raw = self.values if self.raw is None else self.raw
        return [(z, f, g) for z, f, g in zip(self.grid, raw, self.values)]


def _cross(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def convex_envelope(samples, tail_limit=None):
    """Lower convex envelope of sampled ``(strain, value)`` rows.

    Built as the lower hull of the points (monotone chain) and interpolated
    back onto the sample strains. With ``tail_limit`` the samples are read as
    a function on a half line tending to that limit at +inf. The hull is
    then closed by the ray to (+inf, tail_limit), which is flat from the
    lowest hull vertex at every finite strain; a limit below the samples
    cannot be closed that way and is refused.
    """
    samples = np.asarray(samples, dtype=float)
    if samples.ndim != 2 or samples.shape[1] != 2:
        raise InputError('Samples must be (strain, value) rows')
    grid, raw = samples[:, 0], samples[:, 1]
    if grid.size < ENVELOPE_MIN_POINTS:
        raise InputError(
            f'Envelope needs at least {ENVELOPE_MIN_POINTS} samples'
        )
    if not np.all(np.isfinite(samples)):
        raise InputError('Envelope samples must be finite')
    if not np.all(np.diff(grid) > 0):
        raise InputError('Envelope strains must be strictly increasing')

    hull = []
    for point in samples:
        while len(hull) >= 2 and _cross(hull[-2], hull[-1], point) <= 0:
            hull.pop()
        hull.append(point)
    hull = np.array(hull)
    if tail_limit is not None:
        if tail_limit < raw.min():
            raise InputError('tail_limit lies below the sampled minimum')
        hull = hull[:int(np.argmin(hull[:, 1])) + 1]
    values = np.interp(grid, hull[:, 0], hull[:, 1])

    gap = raw - values
    departed = np.flatnonzero(gap > 1e-12 * np.maximum(1.0, np.abs(raw)))
    if departed.size == 0:
        kink = grid[-1]
    else:
        kink = grid[max(departed[0] - 1, 0)]
    return EnvelopeTable(grid=grid, values=values, kink=float(kink), raw=raw)


def _clamped(model, z, function):
    z = np.asarray(z, dtype=float)
    gamma = model.gamma
    with np.errstate(invalid='ignore'):
        value = np.where(
            z > 0, function(np.minimum(np.where(z > 0, z, gamma), gamma)),
            np.inf
        )
    return value[()] if value.ndim == 0 else value


def jcb_star_star(model, z):
    """J_CB**(z): J_CB(z) up to gamma, J_CB(gamma) beyond."""
    return _clamped(model, z, model.family.cauchy_born)


def psi_star_star(model, j, z):
    """psi_j**(z): psi_j(z) up to gamma, psi_j(gamma) beyond."""
    return _clamped(model, z, lambda x: model.psi(j, x))
