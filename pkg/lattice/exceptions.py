class LatticeError(Exception):
    """Base class of every error raised by the lattice app."""
    exit_code = 1


class DomainError(LatticeError, ValueError):
    exit_code = 2


class InputError(LatticeError, ValueError):
    exit_code = 2


class ConfigurationError(LatticeError, ValueError):
    exit_code = 2


class UnsupportedError(LatticeError):
    exit_code = 2


class ConsistencyError(LatticeError):
    exit_code = 3


class NonConvergenceError(LatticeError):
    exit_code = 4
