"""Exception types shared across the package."""


class PatrolError(Exception):
    """Base class for all package errors."""


class ParseError(PatrolError):
    """Graph document is malformed."""


class ValidationError(PatrolError):
    """Graph or scenario violates a structural invariant."""


class ResourceLimit(PatrolError):
    """Walk library would exceed the configured memory cap."""

    def __init__(self, message, hops=None, estimated_bytes=None):
        super().__init__(message)
        self.hops = hops
        self.estimated_bytes = estimated_bytes


class EmptyCandidates(PatrolError):
    """No walks available for the chosen (source, target) pairs."""


class SimulationStalled(PatrolError):
    """Internal error: an agent has nowhere to go."""


class EmptyGroup(PatrolError):
    """Aggregation requested over an empty collection of runs."""
