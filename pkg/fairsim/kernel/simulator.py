"""Deterministic discrete-event kernel."""

import heapq
import logging
from typing import Any, Callable, Dict, List, Optional, Tuple

from fairsim.kernel.events import Event, EventTrace, TraceRecord
from fairsim.kernel.rng import RngStream
from fairsim.kernel.time import SimTime


logger = logging.getLogger(__name__)

Handler = Callable[[Event], None]


class SimulationError(Exception):
    """Base exception for simulation kernel errors."""
    pass


class SchedulingError(SimulationError):
    """An event was scheduled before the current clock."""

    def __init__(self, message: str, fire_at: SimTime, now: SimTime):
        super().__init__(message)
        self.fire_at = fire_at
        self.now = now


class Kernel:
    """Virtual clock, event queue and per-component random streams.

    Events are processed in lexicographic ``(fire_at, seq)`` order, where ``seq``
    is the scheduling sequence number. Everything runs on one thread; two
    kernels share no state and may run concurrently.
    """

    def __init__(self, seed: int = 0, record_trace: bool = True):
        """Initialize the kernel.

        Args:
            seed: Master seed every RngStream is derived from
            record_trace: Keep a TraceRecord for every processed event
        """
        self.seed = seed
        self.record_trace = record_trace
        self._now: SimTime = 0
        self._next_seq = 0
        self._queue: List[Tuple[SimTime, int, Event]] = []
        self._handlers: Dict[str, Handler] = {}
        self._streams: Dict[str, RngStream] = {}
        self.trace = EventTrace()
        self.logger = logging.getLogger(f"{__name__}.{self.__class__.__name__}")

    @property
    def now(self) -> SimTime:
        """Current simulation time."""
        return self._now

    @property
    def pending(self) -> int:
        """Number of events still queued."""
        return len(self._queue)

    def register(self, component_id: str, handler: Handler) -> None:
        """Register the handler receiving events targeted at ``component_id``."""
        if component_id in self._handlers:
            self.logger.warning(f"Component '{component_id}' already registered, overwriting")
        self._handlers[component_id] = handler

    def rng(self, stream_id: str) -> RngStream:
        """Return the (cached) random stream for a component label."""
        stream = self._streams.get(stream_id)
        if stream is None:
            stream = RngStream(self.seed, stream_id)
            self._streams[stream_id] = stream
        return stream

    def schedule(self, event: Event) -> int:
        """Enqueue an event and assign its sequence number.

        Args:
            event: Event to schedule; ``fire_at`` must not be in the past

        Returns:
            The event id (its sequence number)

        Raises:
            SchedulingError: If ``event.fire_at`` is before the current clock
        """
        if event.fire_at < self._now:
            raise SchedulingError(
                f"Event {event.target}:{event.action} scheduled at {event.fire_at} "
                f"before clock {self._now}",
                fire_at=event.fire_at,
                now=self._now,
            )
        event.seq = self._next_seq
        self._next_seq += 1
        heapq.heappush(self._queue, (event.fire_at, event.seq, event))
        return event.seq

    def call_at(self, fire_at: SimTime, target: str, action: str, payload: Any = None) -> int:
        """Convenience wrapper building the Event for :meth:`schedule`."""
        return self.schedule(Event(fire_at=fire_at, target=target, action=action, payload=payload))

    def call_after(self, delay: SimTime, target: str, action: str, payload: Any = None) -> int:
        return self.call_at(self._now + delay, target, action, payload)

    def next_event_time(self) -> Optional[SimTime]:
        return self._queue[0][0] if self._queue else None

    def run_until(self, t_stop: SimTime) -> EventTrace:
        """Process every event with ``fire_at <= t_stop``.

        Args:
            t_stop: Time to advance the clock to

        Returns:
            Trace of the events processed by this call
        """
        processed = EventTrace()
        while self._queue and self._queue[0][0] <= t_stop:
            fire_at, seq, event = heapq.heappop(self._queue)
            self._now = fire_at
            handler = self._handlers.get(event.target)
            if handler is None:
                raise SimulationError(f"No handler registered for component '{event.target}'")
            handler(event)
            record = TraceRecord(time=fire_at, seq=seq, component=event.target, action=event.action)
            processed.append(record)
            if self.record_trace:
                self.trace.append(record)
        if t_stop > self._now:
            self._now = t_stop
        return processed

    def run(self) -> EventTrace:
        """Process events until the queue drains."""
        processed = EventTrace()
        while self._queue:
            processed.extend(self.run_until(self._queue[0][0]))
        return processed
