"""Message fragmentation, reassembly and priority timestamping."""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Sequence, Set, Tuple

from fairsim.infra.errors import InvalidMessageError
from fairsim.infra.wire import WireMessage
from fairsim.kernel.time import MS, SimTime


logger = logging.getLogger(__name__)

DEFAULT_MTU = 1500
DEFAULT_REASSEMBLY_TIMEOUT: SimTime = 100 * MS


class TimestampPolicy(str, Enum):
    """Which fragment's arrival time becomes the order's priority timestamp."""
    FIRST_FRAGMENT = "first-fragment"
    LAST_FRAGMENT = "last-fragment"


@dataclass(frozen=True)
class Fragment:
    """One fixed-size piece of a message."""
    message_id: int
    index: int
    count: int
    valid_checksum: bool
    wire: WireMessage

    @property
    def key(self) -> tuple:
        return self.wire.key()


@dataclass(frozen=True)
class FragmentSend:
    t_send: SimTime
    fragment: Fragment


def fragment_count(size_bytes: int, mtu: int = DEFAULT_MTU) -> int:
    if size_bytes <= 0 or mtu <= 0:
        raise InvalidMessageError(f"Cannot fragment {size_bytes} bytes at mtu {mtu}")
    return max(1, math.ceil(size_bytes / mtu))


def fragment_and_send(
    msg: WireMessage,
    mtu: int,
    schedule: Sequence[SimTime],
    valid: Optional[Sequence[bool]] = None,
) -> List[FragmentSend]:
    """Split ``msg`` into MTU-sized fragments with per-fragment send times.

    Args:
        msg: Message to split
        mtu: Maximum fragment payload in bytes
        schedule: Nondecreasing send time per fragment; a single time applies
            to every fragment
        valid: Optional checksum validity per fragment (default all valid)

    Returns:
        One FragmentSend per fragment, in index order

    Raises:
        InvalidMessageError: If the schedule is decreasing or has the wrong length
    """
    count = fragment_count(msg.size_bytes, mtu)
    times = list(schedule)
    if len(times) == 1:
        times = times * count
    if len(times) != count:
        raise InvalidMessageError(f"Schedule has {len(times)} times for {count} fragments")
    if any(later < earlier for earlier, later in zip(times, times[1:])):
        raise InvalidMessageError(f"Fragment schedule must be nondecreasing: {times}")
    checksums = list(valid) if valid is not None else [True] * count
    if len(checksums) != count:
        raise InvalidMessageError(f"Checksum flags has {len(checksums)} entries for {count} fragments")
    return [
        FragmentSend(t, Fragment(msg.message_id, i, count, checksums[i], msg))
        for i, t in enumerate(times)
    ]


class ReassemblyStatus(str, Enum):
    STARTED = "started"
    PROGRESS = "progress"
    COMPLETE = "complete"
    ABANDONED = "abandoned"
    IGNORED = "ignored"


@dataclass
class PartialMessage:
    wire: WireMessage
    count: int
    first_arrival: SimTime
    received: Set[int] = field(default_factory=set)


@dataclass(frozen=True)
class ReassemblyOutcome:
    """What a fragment arrival did to its message.

    ``priority_ts`` is set on COMPLETE (and on STARTED under the first-fragment
    policy, where it is the reserved timestamp).
    """
    status: ReassemblyStatus
    key: tuple
    wire: WireMessage
    priority_ts: Optional[SimTime] = None
    first_arrival: Optional[SimTime] = None


class Reassembler:
    """Engine-side buffer turning fragments back into messages.

    A message only reaches the book once every fragment arrived with a valid
    checksum. A fragment with an invalid checksum abandons its message at once;
    a message still incomplete after ``timeout`` is abandoned on expiry.
    """

    def __init__(self, policy: TimestampPolicy = TimestampPolicy.FIRST_FRAGMENT,
                 timeout: SimTime = DEFAULT_REASSEMBLY_TIMEOUT):
        self.policy = policy
        self.timeout = timeout
        self._partial: Dict[tuple, PartialMessage] = {}
        self._dead: Dict[tuple, SimTime] = {}
        self.abandoned = 0
        self.logger = logging.getLogger(f"{__name__}.{self.__class__.__name__}")

    @property
    def pending(self) -> int:
        return len(self._partial)

    @property
    def dead(self) -> int:
        return len(self._dead)

    def forget(self, before: SimTime) -> int:
        """Stop ignoring fragments of messages abandoned before ``before``."""
        stale = [key for key, t in self._dead.items() if t < before]
        for key in stale:
            del self._dead[key]
        return len(stale)

    def receive(self, fragment: Fragment, at: SimTime) -> ReassemblyOutcome:
        key = fragment.key
        if key in self._dead:
            return ReassemblyOutcome(ReassemblyStatus.IGNORED, key, fragment.wire)

        if not fragment.valid_checksum:
            partial = self._partial.pop(key, None)
            self._dead[key] = at
            self.abandoned += 1
            self.logger.debug(
                f"Dropped message {fragment.message_id} from {fragment.wire.participant}: "
                f"invalid checksum on fragment {fragment.index + 1}/{fragment.count}"
            )
            return ReassemblyOutcome(
                ReassemblyStatus.ABANDONED, key, fragment.wire,
                first_arrival=partial.first_arrival if partial else None,
            )

        if fragment.count == 1:
            return ReassemblyOutcome(ReassemblyStatus.COMPLETE, key, fragment.wire, at, at)

        partial = self._partial.get(key)
        started = partial is None
        if partial is None:
            partial = PartialMessage(wire=fragment.wire, count=fragment.count, first_arrival=at)
            self._partial[key] = partial
        partial.received.add(fragment.index)

        if len(partial.received) == partial.count:
            del self._partial[key]
            ts = partial.first_arrival if self.policy is TimestampPolicy.FIRST_FRAGMENT else at
            return ReassemblyOutcome(ReassemblyStatus.COMPLETE, key, partial.wire, ts, partial.first_arrival)
        if started:
            reserved = at if self.policy is TimestampPolicy.FIRST_FRAGMENT else None
            return ReassemblyOutcome(ReassemblyStatus.STARTED, key, partial.wire, reserved, at)
        return ReassemblyOutcome(ReassemblyStatus.PROGRESS, key, partial.wire, None, partial.first_arrival)

    def expire(self, key: tuple, at: SimTime) -> Optional[ReassemblyOutcome]:
        """Abandon ``key`` if it is still incomplete; called when its timeout fires."""
        partial = self._partial.pop(key, None)
        if partial is None:
            return None
        self._dead[key] = at
        self.abandoned += 1
        self.logger.warning(
            f"Reassembly timeout after {at - partial.first_arrival}ns: discarded message "
            f"{partial.wire.message_id} from {partial.wire.participant} "
            f"({len(partial.received)}/{partial.count} fragments)"
        )
        return ReassemblyOutcome(ReassemblyStatus.ABANDONED, key, partial.wire,
                                 first_arrival=partial.first_arrival)
