"""Scenario loading, validation and sweep errors."""

from typing import List, Optional, Tuple

from fairsim.infra.errors import TopologyError


class ScenarioError(Exception):
    """Base exception for scenario handling."""
    pass


class ScenarioValidationError(ScenarioError):
    """Schema violation; ``errors`` holds ``(dotted field path, message)`` pairs."""

    def __init__(self, message: str, errors: Optional[List[Tuple[str, str]]] = None):
        super().__init__(message)
        self.errors = errors or []

    def __str__(self) -> str:
        if not self.errors:
            return super().__str__()
        details = "; ".join(f"{path}: {msg}" for path, msg in self.errors)
        return f"{super().__str__()}: {details}"


class SweepError(ScenarioError):
    """The sweep parameter path does not address a numeric field."""
    pass


__all__ = ["ScenarioError", "ScenarioValidationError", "SweepError", "TopologyError"]
