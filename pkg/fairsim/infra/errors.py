"""Exceptions raised by infrastructure models."""


class InfrastructureError(Exception):
    """Base exception for infrastructure model errors."""
    pass


class InvalidMessageError(InfrastructureError):
    """A message or fragment schedule violates a model precondition."""
    pass


class TopologyError(InfrastructureError):
    """A component references an endpoint that does not exist."""
    pass
