"""Deterministic discrete-event simulation kernel."""

from fairsim.kernel.events import Event, EventTrace, TraceRecord
from fairsim.kernel.rng import RngStream, derive_seed
from fairsim.kernel.simulator import Kernel, SchedulingError, SimulationError
from fairsim.kernel.time import MS, NS, SECOND, US, SimTime, format_simtime, to_simtime

__all__ = [
    "Event",
    "EventTrace",
    "TraceRecord",
    "RngStream",
    "derive_seed",
    "Kernel",
    "SchedulingError",
    "SimulationError",
    "SimTime",
    "NS",
    "US",
    "MS",
    "SECOND",
    "format_simtime",
    "to_simtime",
]
