"""Countermeasures: speedbumps, batch windows and connection limits."""

import dataclasses
import logging
from dataclasses import dataclass
from typing import Optional, TypeVar

from fairsim.kernel.time import SimTime


logger = logging.getLogger(__name__)

LinkT = TypeVar("LinkT")


class RemediationError(Exception):
    """Base exception for invalid remediation settings."""
    pass


@dataclass(frozen=True)
class Speedbump:
    """Constant delay added to every message on one link or gateway."""
    attach_point: str
    delay: SimTime

    def __post_init__(self) -> None:
        if self.delay < 0:
            raise RemediationError(f"Speedbump delay must be >= 0, got {self.delay}")


@dataclass(frozen=True)
class BatchPolicy:
    """Discrete-time matching window.

    Boundaries sit at ``phase + k * window``; ``phase`` is 0 unless a randomized
    phase was drawn for the run.
    """
    window: SimTime = 0
    enabled: bool = False
    phase: SimTime = 0

    def __post_init__(self) -> None:
        if self.window < 0:
            raise RemediationError(f"Batch window must be >= 0, got {self.window}")
        if self.enabled and self.window > 0 and not 0 <= self.phase < self.window:
            raise RemediationError(f"Phase {self.phase} outside [0, {self.window})")

    @property
    def active(self) -> bool:
        """A zero window degenerates to continuous matching."""
        return self.enabled and self.window > 0

    def window_index(self, t: SimTime) -> int:
        return (t - self.phase) // self.window

    def window_close(self, index: int) -> SimTime:
        return self.phase + (index + 1) * self.window


@dataclass(frozen=True)
class ConnectionLimitPolicy:
    """Maximum simultaneous gateway sessions per participant."""
    limit: Optional[int] = None

    @property
    def active(self) -> bool:
        return self.limit is not None


def apply_speedbump(link: LinkT, delay: SimTime) -> LinkT:
    """Return a copy of ``link`` (a Gateway or InterBookLink) with ``delay`` added.

    Every traversal of the returned link takes exactly ``delay`` longer than
    the original link's latency model.
    """
    if delay < 0:
        raise RemediationError(f"Speedbump delay must be >= 0, got {delay}")
    if delay == 0:
        return link
    current = getattr(link, "speedbump_ns")
    logger.debug(f"Speedbump of {delay}ns on {getattr(link, 'id', link)}")
    return dataclasses.replace(link, speedbump_ns=current + delay)  # type: ignore[type-var]


def set_connection_limit(limit: int) -> ConnectionLimitPolicy:
    """Activate a per-participant connection limit."""
    if limit < 1:
        raise RemediationError(f"Connection limit must be >= 1, got {limit}")
    return ConnectionLimitPolicy(limit=limit)
