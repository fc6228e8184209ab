"""Exception types shared across the toolkit."""


class ToolkitError(Exception):
    """Base class for all circlekit errors."""


class InvalidMapError(ToolkitError):
    """A circle map violates monotonicity/equivariance or other structural invariants."""


class DomainError(ToolkitError):
    """An argument lies outside the admissible domain (excluded point, wrong support, ...)."""


class BreakpointError(DomainError):
    """A derivative or Schwarzian was requested inside the guard band of a nonsmooth point."""


class PreconditionError(ToolkitError):
    """A documented operation precondition failed."""


class ResolutionError(ToolkitError):
    """Too few samples / quadrature points for the requested accuracy."""


class TruncationError(ToolkitError):
    """Requested modes or levels exceed the truncation in force."""


class IntegrationFailureError(ToolkitError):
    """The adaptive ODE integrator could not reach the requested tolerance."""


class NumericsError(ToolkitError):
    """A numerical procedure failed to converge (should not happen on valid input)."""
