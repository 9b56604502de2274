"""Exception hierarchy shared across the package.

Each class maps to one CLI exit code so failures stay distinguishable
at the command line (see ``mefcon.cli``).
"""


class MefconError(Exception):
    """Base class for all package errors."""

    exit_code = 1


class ConfigError(MefconError):
    """Malformed or inconsistent scenario configuration."""

    exit_code = 2


class SimulationError(MefconError):
    """Numerical failure during integration (non-finite states)."""

    exit_code = 3


class SolverError(MefconError):
    """Linear-algebra failure (eigensolver breakdown, degenerate null space)."""

    exit_code = 4


class BoundViolationError(MefconError):
    """A certified envelope was violated at some grid point."""

    exit_code = 5
