"""Exception hierarchy shared by all modules."""


class ErHittingError(Exception):
    """Base class for all errors raised by this package."""


class ParameterError(ErHittingError, ValueError):
    """An argument is outside the documented domain."""


class UnreachableTargetError(ErHittingError):
    """Some vertex cannot reach the target, so its hitting time is infinite."""

    def __init__(self, target, vertex):
        self.target = target
        self.vertex = vertex
        super().__init__(f"unreachable target: vertex {vertex} cannot reach {target}")


class SolverError(ErHittingError):
    """A linear solve failed or its residual stayed above tolerance."""


class ConvergenceError(ErHittingError):
    """An iterative method did not converge.

    ``periodic`` is set when the iterates were oscillating rather than drifting,
    which is the signature of a periodic (bipartite-like) chain.
    """

    def __init__(self, message, iterations, periodic=False):
        self.iterations = iterations
        self.periodic = periodic
        super().__init__(message)


class CapExceededError(ErHittingError):
    """A simulated walk ran longer than the configured step cap."""


class DiameterError(ErHittingError):
    """Some vertex lies at distance >= 3 from the target."""
