"""Simulation time units.

Simulation time is an integer count of nanoseconds since session start.
"""

from typing import Union

SimTime = int

NS: SimTime = 1
US: SimTime = 1_000
MS: SimTime = 1_000_000
SECOND: SimTime = 1_000_000_000


def to_simtime(value: Union[int, float]) -> SimTime:
    """Round a sampled duration to whole nanoseconds, truncating at zero."""
    ns = int(round(value))
    return ns if ns > 0 else 0


def format_simtime(t: SimTime) -> str:
    """Human-readable rendering used in tables and log lines."""
    if t >= MS and t % US == 0:
        return f"{t / MS:g}ms"
    if t >= US:
        return f"{t / US:g}µs"
    return f"{t}ns"
