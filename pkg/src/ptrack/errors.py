"""Exception hierarchy shared by all ptrack modules."""


class PtrackError(Exception):
    """Base class for every error raised by ptrack."""


class InvalidParameterError(PtrackError, ValueError):
    """A constructor or function received an inadmissible parameter."""


class DomainError(PtrackError, ValueError):
    """A specific volume (or derived quantity) lies outside the law's domain."""


class RangeError(PtrackError, ValueError):
    """A target value (h, a, ...) is not attained on the domain."""


class NumericalFailureError(PtrackError, RuntimeError):
    """Quadrature or root finding did not reach the requested tolerance."""

    def __init__(self, message, estimate=None):
        super().__init__(message)
        self.estimate = estimate


class BranchMismatchError(PtrackError, ValueError):
    """A (kind, family) request does not match the direction of the jump."""


class ConsistencyError(PtrackError, ValueError):
    """A pair of states is not connected by the claimed wave curve."""


class EntropyError(PtrackError, ValueError):
    """A shock violates the Lax inequalities."""


class TopologyError(PtrackError, RuntimeError):
    """Colliding fronts do not share consistent inner states."""


class LemmaPreconditionError(PtrackError, ValueError):
    """The two-point large-shock problem was posed outside its hypotheses."""


class ConstructionError(PtrackError, RuntimeError):
    """A periodic pattern could not be built for the requested parameters."""


class SeedingError(PtrackError, RuntimeError):
    """Small-wave seeding pushed a state outside the admissible window."""
