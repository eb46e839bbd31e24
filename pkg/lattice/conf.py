"""Numerical defaults of the lattice app.

Values can be overridden per project through the ``LATTICE`` settings
dictionary, e.g.::

    LATTICE = {'CELL_GTOL': 1e-10}

Settings are looked up on every attribute access, so ``override_settings``
in tests takes effect immediately.
"""
from contextlib import contextmanager

from django.conf import settings

DEFAULTS = {
    # optim
    'GTOL': 1e-9,
    'MAX_ITER': 5000,
    'LBFGS_MEMORY': 10,
    'ARMIJO': 1e-4,
    'BACKTRACK': 0.5,
    'MAX_BACKTRACKS': 60,
    'FNOISE': 1e-12,
    'GOLDEN_XTOL': 1e-12,
    # effective_density
    'INNER_GRID_POINTS': 2000,
    # cell_formula
    'CELL_GTOL': 1e-9,
    'CELL_MAX_ITER': 20000,
    # chain_model
    'CHAIN_GTOL': 1e-7,
    'CHAIN_MAX_ITER': 20000,
    'CHAIN_SCREEN_ITER': 2000,
    # boundary_layer
    'LAYER_GTOL': 1e-12,
    'LAYER_MAX_ITER': 20000,
    'LAYER_TOL': 1e-10,
    'LAYER_N_MAX': 512,
    'BETA_ROUTE_TOL': 1e-6,
    'DECAY_GRID_POINTS': 10 ** 4,
    'DECAY_ATOL': 1e-10,
    'MONOTONE_ATOL': 1e-12,
    # experiment_cli
    'OUTPUT_DIR': 'output',
}


class LatticeSettings:
    def __init__(self):
        self._overrides = {}

    def __getattr__(self, attr):
        if attr not in DEFAULTS:
            raise AttributeError(f'Invalid lattice setting: "{attr}"')
        if attr in self._overrides:
            return self._overrides[attr]
        return getattr(settings, 'LATTICE', {}).get(attr, DEFAULTS[attr])

    def snapshot(self):
        """Current numeric settings as a hashable tuple, for cache keys."""
        return tuple((name, getattr(self, name)) for name in sorted(DEFAULTS)
                     if isinstance(DEFAULTS[name], (int, float)))

    @contextmanager
    def override(self, **values):
        """Temporarily replace defaults, e.g. with a run's tolerances."""
        unknown = set(values) - set(DEFAULTS)
        if unknown:
            raise AttributeError(f'Invalid lattice setting: "{unknown.pop()}"')
        previous = self._overrides
        self._overrides = {**previous, **values}
        try:
            yield self
        finally:
            self._overrides = previous


lattice_settings = LatticeSettings()


def resolve(value, name):
    """Return ``value`` unless it is None, else the configured default."""
    return getattr(lattice_settings, name) if value is None else value
