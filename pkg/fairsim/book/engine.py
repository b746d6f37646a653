"""Matching engine: reassembly, sequencing, dedup and continuous or batch matching."""

import heapq
import itertools
import logging
from typing import Dict, Iterable, List, Optional, Protocol, Set, Tuple

from fairsim.book.models import MatchResult, Message
from fairsim.book.order_book import OrderBook
from fairsim.infra.fragments import (
    DEFAULT_REASSEMBLY_TIMEOUT,
    Fragment,
    Reassembler,
    ReassemblyStatus,
    TimestampPolicy,
)
from fairsim.infra.wire import WireMessage
from fairsim.kernel.events import Event
from fairsim.kernel.rng import RngStream
from fairsim.kernel.simulator import Kernel, SimulationError
from fairsim.kernel.time import SimTime
from fairsim.remediation.policies import BatchPolicy


logger = logging.getLogger(__name__)


class EngineListener(Protocol):
    """Receives the engine's ground-truth notifications."""

    def message_accepted(self, engine_id: str, wire: WireMessage, priority_ts: SimTime) -> None:
        ...

    def message_processed(self, engine_id: str, wire: Optional[WireMessage], result: MatchResult) -> None:
        ...

    def message_dropped(self, engine_id: str, wire: WireMessage, reason: str) -> None:
        ...


class MatchingEngine:
    """Kernel component owning one order book.

    Complete messages are released to the book in priority-timestamp order.
    Under the first-fragment policy a message's timestamp is reserved when its
    first fragment arrives, and no later-stamped message is released while the
    reservation is pending; abandoning the message releases the reservation.
    Replicated copies are deduplicated on ``(participant, message id)``.
    """

    def __init__(
        self,
        engine_id: str,
        kernel: Kernel,
        book: Optional[OrderBook] = None,
        timestamp_policy: TimestampPolicy = TimestampPolicy.FIRST_FRAGMENT,
        reassembly_timeout: SimTime = DEFAULT_REASSEMBLY_TIMEOUT,
        batch_policy: Optional[BatchPolicy] = None,
        rng: Optional[RngStream] = None,
        listener: Optional[EngineListener] = None,
        known_participants: Optional[Iterable[str]] = None,
    ):
        self.id = engine_id
        self.component_id = f"engine:{engine_id}"
        self.kernel = kernel
        self.book = book or OrderBook(engine_id)
        self.reassembler = Reassembler(timestamp_policy, reassembly_timeout)
        self.batch_policy = batch_policy or BatchPolicy()
        self.rng = rng or kernel.rng(f"{self.component_id}/batch")
        self.listener = listener
        self.known_participants: Optional[Set[str]] = (
            set(known_participants) if known_participants is not None else None
        )
        self._tiebreak = itertools.count()
        self._reserved: Dict[tuple, Tuple[SimTime, int]] = {}
        self._ready: List[Tuple[SimTime, int, WireMessage]] = []
        self._seen: Dict[tuple, SimTime] = {}
        self._windows: Dict[int, List[Tuple[WireMessage, SimTime]]] = {}
        self.duplicates = 0
        self.logger = logging.getLogger(f"{__name__}.{self.__class__.__name__}")
        kernel.register(self.component_id, self.handle)

    @property
    def timestamp_policy(self) -> TimestampPolicy:
        return self.reassembler.policy

    @property
    def reservations(self) -> int:
        return len(self._reserved)

    @property
    def remembered(self) -> int:
        """Dedup keys currently held."""
        return len(self._seen)

    def forget(self, before: SimTime) -> int:
        """Drop dedup and dead-message keys recorded before ``before``.

        Called once the races those keys belonged to have closed. A copy that
        arrives after its key was forgotten is handled as a new message.

        Returns:
            Number of keys dropped
        """
        stale = [key for key, t in self._seen.items() if t < before]
        for key in stale:
            del self._seen[key]
        return len(stale) + self.reassembler.forget(before)

    def deliver_at(self, t: SimTime, fragment: Fragment) -> None:
        """Schedule arrival of one fragment at this engine."""
        self.kernel.call_at(t, self.component_id, "fragment", fragment)

    def handle(self, event: Event) -> None:
        if event.action == "fragment":
            self._on_fragment(event.payload)
        elif event.action == "reassembly_timeout":
            self._on_timeout(event.payload)
        elif event.action == "window_close":
            self._on_window_close(event.payload)
        else:
            raise SimulationError(f"Engine {self.id} got unknown action '{event.action}'")

    def inject(self, message: Message) -> MatchResult:
        """Apply an exchange-side message immediately, bypassing the gateways."""
        result = self.book.process_message(message, self.kernel.now)
        if self.listener is not None:
            self.listener.message_processed(self.id, None, result)
        return result

    def _on_fragment(self, fragment: Fragment) -> None:
        now = self.kernel.now
        outcome = self.reassembler.receive(fragment, now)

        if outcome.status is ReassemblyStatus.STARTED:
            if outcome.priority_ts is not None:
                self._reserved[outcome.key] = (outcome.priority_ts, next(self._tiebreak))
            self.kernel.call_at(
                now + self.reassembler.timeout, self.component_id, "reassembly_timeout", outcome.key
            )
        elif outcome.status is ReassemblyStatus.COMPLETE:
            reservation = self._reserved.pop(outcome.key, None)
            tiebreak = reservation[1] if reservation else next(self._tiebreak)
            ts = outcome.priority_ts if outcome.priority_ts is not None else now
            heapq.heappush(self._ready, (ts, tiebreak, outcome.wire))
            self._release()
        elif outcome.status is ReassemblyStatus.ABANDONED:
            self._abandon(outcome.key, outcome.wire, "invalid checksum")

    def _on_timeout(self, key: tuple) -> None:
        outcome = self.reassembler.expire(key, self.kernel.now)
        if outcome is not None:
            self._abandon(key, outcome.wire, "reassembly timeout")

    def _abandon(self, key: tuple, wire: WireMessage, reason: str) -> None:
        self._reserved.pop(key, None)
        if self.listener is not None:
            self.listener.message_dropped(self.id, wire, reason)
        self._release()

    def _release(self) -> None:
        while self._ready:
            ts, tiebreak, wire = self._ready[0]
            if self._reserved and min(self._reserved.values()) < (ts, tiebreak):
                break
            heapq.heappop(self._ready)
            self._dispatch(wire, ts)

    def _dispatch(self, wire: WireMessage, priority_ts: SimTime) -> None:
        key = wire.dedup_key()
        if key in self._seen:
            self.duplicates += 1
            self.logger.debug(f"Discarded duplicate copy {wire.copy_index} of message {wire.message_id}")
            return
        self._seen[key] = self.kernel.now
        if self.known_participants is not None and wire.participant not in self.known_participants:
            if self.listener is not None:
                self.listener.message_dropped(self.id, wire, "unknown participant")
            return
        if self.listener is not None:
            self.listener.message_accepted(self.id, wire, priority_ts)

        now = self.kernel.now
        if self.batch_policy.active:
            index = self.batch_policy.window_index(now)
            window = self._windows.get(index)
            if window is None:
                window = self._windows[index] = []
                self.kernel.call_at(
                    self.batch_policy.window_close(index), self.component_id, "window_close", index
                )
            window.append((wire, now))
            return

        result = self.book.process_message(wire.message, now)
        if self.listener is not None:
            self.listener.message_processed(self.id, wire, result)

    def _on_window_close(self, index: int) -> None:
        collected = self._windows.pop(index, [])
        by_key = {wire.dedup_key(): wire for wire, _ in collected}
        batch = self.book.batch_process(
            self.batch_policy.window,
            [(wire.message, arrival) for wire, arrival in collected],
            self.rng,
            close_at=self.kernel.now,
            phase=self.batch_policy.phase,
        )
        self.logger.debug(f"Window {index} closed with {len(collected)} messages")
        if self.listener is not None:
            for result in batch.results:
                wire = by_key[(result.message.participant, result.message.order_id)]
                self.listener.message_processed(self.id, wire, result)
