"""Lennard-Jones family J_j(z) = J(jz), J(z) = k1/z^12 - k2/z^6 on (0, +inf).

Energies are extended reals: any strain z <= 0 evaluates to +inf.
Derivatives are closed form and only defined on (0, +inf).
"""
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from .constants import (
    AUDIT_MIN_POINTS, COARSE_GRID_ERROR, DOMAIN_ERROR, INVALID_FAMILY_ERROR,
    MAX_K
)
from .effective_density import build_model, j0j
from .exceptions import ConfigurationError, DomainError, InputError


def _scalar_or_array(value):
    return value[()] if isinstance(value, np.ndarray) and value.ndim == 0 \
        else value


@dataclass(frozen=True)
class PotentialFamily:
    k1: float
    k2: float
    K: int

    def __post_init__(self):
        if not (self.k1 > 0 and self.k2 > 0 and 1 <= int(self.K) <= MAX_K):
            raise InputError(INVALID_FAMILY_ERROR.format(max_K=MAX_K))
        object.__setattr__(self, 'k1', float(self.k1))
        object.__setattr__(self, 'k2', float(self.k2))
        object.__setattr__(self, 'K', int(self.K))

    @property
    def orders(self):
        return range(1, self.K + 1)

    @property
    def delta1(self):
        return (2.0 * self.k1 / self.k2) ** (1.0 / 6.0)

    def evaluate(self, j, z):
        """J_j(z) with J_j = +inf on z <= 0."""
        x = j * np.asarray(z, dtype=float)
        feasible = x > 0
        with np.errstate(over='ignore', divide='ignore', invalid='ignore'):
            inv6 = np.where(feasible, x, 1.0) ** -6
            value = np.where(
                feasible, self.k1 * inv6 * inv6 - self.k2 * inv6, np.inf
            )
        return _scalar_or_array(value)

    def derivative(self, j, z, order=1):
        """Closed-form first or second derivative of J_j in z."""
        z = np.asarray(z, dtype=float)
        if np.any(~(z > 0)):
            raise DomainError(DOMAIN_ERROR)
        x = j * z
        if order == 1:
            value = j * (-12.0 * self.k1 * x ** -13 + 6.0 * self.k2 * x ** -7)
        elif order == 2:
            value = j * j * (156.0 * self.k1 * x ** -14
                             - 42.0 * self.k2 * x ** -8)
        else:
            raise InputError(f'Unsupported derivative order {order}')
        return _scalar_or_array(value)

    def cauchy_born(self, z):
        """J_CB(z) = sum_j J_j(z)."""
        return sum(self.evaluate(j, z) for j in self.orders)

    def cauchy_born_derivative(self, z, order=1):
        return sum(self.derivative(j, z, order) for j in self.orders)

    def landmarks(self):
        delta1 = self.delta1
        zc1 = (13.0 / 7.0) ** (1.0 / 6.0) * delta1
        return Landmarks(
            delta=np.array([delta1 / j for j in self.orders]),
            zc1=zc1,
            zc2=zc1 / 2.0 if self.K >= 2 else None,
            zc3=delta1,
        )

    @property
    def energy_scale(self):
        """|J_1(delta_1)| = k2^2 / (4 k1), the unit of normalized energies."""
        return self.k2 * self.k2 / (4.0 * self.k1)


@dataclass(frozen=True)
class Landmarks:
    delta: np.ndarray
    zc1: float
    zc2: Optional[float]
    zc3: float


@dataclass(frozen=True)
class AuditCheck:
    name: str
    passed: Optional[bool]
    margin: Optional[float] = None
    witness: Optional[float] = None
    sampled: bool = True
    note: str = ''

    @property
    def status(self):
        if self.passed is None:
            return 'skipped'
        return 'pass' if self.passed else 'fail'


@dataclass
class AuditReport:
    family: PotentialFamily
    grid_points: int
    checks: List[AuditCheck] = field(default_factory=list)

    @property
    def passed(self):
        return all(check.passed for check in self.checks
                   if check.passed is not None)

    def failures(self):
        return [check for check in self.checks if check.passed is False]

    def get(self, name):
        for check in self.checks:
            if check.name == name:
                return check
        raise KeyError(name)

    def add(self, name, margin, witness=None, sampled=True, note=''):
        self.checks.append(AuditCheck(
            name=name, passed=bool(margin > 0), margin=float(margin),
            witness=None if witness is None else float(witness),
            sampled=sampled, note=note
        ))


def default_audit_grid(fam, points=4000):
    delta1 = fam.delta1
    return np.linspace(delta1 / 4.0, 8.0 * delta1, points)


def audit_assumptions(fam, grid=None):
    """Check the structural hypotheses on a strain grid.

    Inequalities quantified over unbounded sets are sampled on ``grid``;
    every check records whether it is a sampled check or exact.
    """
    grid = default_audit_grid(fam) if grid is None \
        else np.sort(np.asarray(grid, dtype=float))
    if grid.size < AUDIT_MIN_POINTS:
        raise ConfigurationError(COARSE_GRID_ERROR.format(
            minimum=AUDIT_MIN_POINTS, size=grid.size
        ))
    grid = grid[grid > 0]
    marks = fam.landmarks()
    model = build_model(fam)
    report = AuditReport(family=fam, grid_points=int(grid.size))
    step = float(np.max(np.diff(grid)))

    # (ii) J_j = +inf on the non-positive half line.
    negatives = -np.linspace(0.0, 10.0 * grid[-1], 50)
    finite = [z for j in fam.orders for z in negatives
              if np.isfinite(fam.evaluate(j, z))]
    report.add(
        '(ii) superlinear growth at -inf', 1.0 if not finite else -1.0,
        witness=finite[0] if finite else None, sampled=False,
        note='J_j is +inf on z <= 0'
    )

    # (iii) J_j -> 0 at +inf, sampled far out.
    far = grid[-1] * np.logspace(0, 3, 20)
    for j in fam.orders:
        tail = np.abs(fam.evaluate(j, far))
        bound = 1e-3 * abs(fam.evaluate(j, marks.delta[j - 1]))
        report.add(
            f'(iii) decay at +inf, j={j}',
            bound - tail[0] if np.all(np.diff(tail) <= 0) else -tail[0],
            witness=far[0],
            note='|J_j| decreasing on the sampled tail'
        )

    # (iv) unique negative minimum at delta_j.
    for j in fam.orders:
        delta = marks.delta[j - 1]
        at_min = fam.evaluate(j, delta)
        away = grid[np.abs(grid - delta) > 2.0 * step]
        values = fam.evaluate(j, away)
        k = int(np.argmin(values))
        report.add(
            f'(iv) unique minimum, j={j}',
            min(values[k] - at_min, -at_min), witness=away[k]
        )

    if fam.K == 1:
        for name in ('(v) splitting coefficients', '(vi) argmin J_0j',
                     '(vii) quadratic growth', '(viii) liminf gap'):
            report.checks.append(AuditCheck(
                name=name, passed=None, note='needs K >= 2'
            ))
    else:
        _audit_splitting(fam, model, grid, report)
    _audit_nnn(fam, model, grid, report)
    return report


def _audit_splitting(fam, model, grid, report):
    report.add(
        '(v) splitting coefficients',
        min(1e-12 - abs(sum(model.c) - 1.0), min(model.c)),
        sampled=False, note='sum c_j = 1 and every c_j > 0'
    )
    window = grid[grid <= 2.0 * model.gamma]
    for j in range(2, fam.K + 1):
        values = np.array([j0j(fam, model, j, z) for z in window])
        k = int(np.argmin(values))
        step = float(np.max(np.diff(window)))
        report.add(
            f'(vi) argmin J_0j at gamma, j={j}',
            2.0 * step - abs(window[k] - model.gamma), witness=window[k]
        )

        # Two-entry perturbations (z+t, z-t, z, ..., z) around gamma.
        ratios = []
        for z in np.linspace(0.97, 1.03, 7) * model.gamma:
            t = np.linspace(1e-3, 2e-2, 10) * model.gamma
            excess = (model.c_j(j) / j) * (
                fam.evaluate(1, z + t) + fam.evaluate(1, z - t)
                - 2.0 * fam.evaluate(1, z)
            )
            ratios.append(np.min(excess / (2.0 * t * t)))
        report.add(
            f'(vii) quadratic growth, j={j}', min(ratios),
            note='sampled near gamma; eta is not determined'
        )

        far = j0j(fam, model, j, grid[-1])
        report.add(
            f'(viii) liminf gap, j={j}', far - model.psi_at_gamma[j - 2],
            witness=grid[-1]
        )


def _audit_nnn(fam, model, grid, report):
    names = ('(1) convex/concave windows', '(2) uniform convexity',
             '(3) monotonicity', '(4) J1\'(zc2) + sup J2\' < 0')
    if fam.K != 2:
        for name in names:
            report.checks.append(AuditCheck(
                name=name, passed=None, note='K = 2 only'
            ))
        return
    marks = fam.landmarks()
    delta1, delta2 = marks.delta
    gamma = model.gamma
    ordering = min(marks.zc1 - delta1, delta1 - gamma, gamma - marks.zc2,
                   marks.zc2 - delta2)
    left = grid[grid < marks.zc1]
    right = grid[grid > marks.zc2]
    convex = float(np.min(fam.derivative(1, left, 2)))
    concave = float(np.min(-fam.derivative(2, right, 2)))
    report.add(names[0], min(ordering, convex, concave),
               note='zc1 > delta1 > gamma > zc2 > delta2, J1 convex '
                    'below zc1, J2 concave above zc2')

    below = grid[grid < marks.zc3]
    alpha_lb = float(np.min(fam.cauchy_born_derivative(below, 2)))
    beta_lb = float(np.min(fam.derivative(1, below, 2)))
    report.add(names[1], min(alpha_lb, beta_lb),
               note=f'J_CB\'\' >= {alpha_lb:.6g}, J1\'\' >= {beta_lb:.6g} '
                    'below zc3 = delta1')

    margins = []
    for j, delta in ((1, delta1), (2, delta2)):
        slope = fam.derivative(j, grid)
        margins.append(np.min(-slope[grid < delta]))
        margins.append(np.min(slope[grid > delta]))
    report.add(names[2], min(margins))

    sup_j2 = fam.derivative(2, marks.zc2)
    report.add(names[3], -(fam.derivative(1, marks.zc2) + sup_j2),
               witness=marks.zc2, sampled=False,
               note='sup J2\' is attained at the inflection point zc2')
