"""Speedbumps, batch windows and connection limits."""

from fairsim.remediation.policies import (
    BatchPolicy,
    ConnectionLimitPolicy,
    RemediationError,
    Speedbump,
    apply_speedbump,
    set_connection_limit,
)

__all__ = [
    "BatchPolicy",
    "ConnectionLimitPolicy",
    "RemediationError",
    "Speedbump",
    "apply_speedbump",
    "set_connection_limit",
]
