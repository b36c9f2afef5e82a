"""Exception types shared across the package.

Each CLI-visible failure class carries the process exit code it maps to, so
the command layer can stay a thin translation shim.
"""


class FracpmError(Exception):
    """Base class; exit code 1 unless a subclass says otherwise."""

    exit_code = 1


class ConfigError(FracpmError):
    """Bad configuration or geometry (unknown key, out-of-range value,
    malformed curve, dt violating the explicit stability bound)."""

    exit_code = 2


class ExcludedParameterError(FracpmError):
    """A parameter combination the theory excludes, e.g. epsilon = 1/2 in a
    sign-definite quantity, or a fit window narrower than two decades."""

    exit_code = 3


class BlowUpError(FracpmError):
    """Evolution aborted because the sup norm doubled.

    Carries the trajectory recorded so far and the last finite state, so
    the command layer can still write diagnostics before exiting.
    """

    exit_code = 4

    def __init__(self, message, trajectory=None, last_good=None):
        super().__init__(message)
        self.trajectory = trajectory
        self.last_good = last_good


class LinearAlgebraError(FracpmError):
    """Iterative or dense linear algebra failed to converge."""

    exit_code = 5
