"""Order gateways and the session registry enforcing connection limits."""

import heapq
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Set

from fairsim.infra.latency import LatencyModel
from fairsim.infra.switch import StoreAndForwardSwitch
from fairsim.infra.wire import WireMessage
from fairsim.kernel.rng import RngStream
from fairsim.kernel.time import SimTime


logger = logging.getLogger(__name__)


@dataclass
class Gateway:
    """Entry point from participants to one matching engine.

    Transit time is ``latency + switch delay + speedbump + load_penalty x in_flight``
    where ``in_flight`` counts earlier messages still travelling through this
    gateway at send time.
    """
    id: str
    engine: str
    latency: LatencyModel = field(default_factory=LatencyModel)
    load_penalty: SimTime = 0
    switch: Optional[StoreAndForwardSwitch] = None
    speedbump_ns: SimTime = 0
    _arrivals: List[SimTime] = field(default_factory=list, init=False, repr=False)

    def in_flight(self, now: SimTime) -> int:
        """Messages sent earlier that have not reached the engine by ``now``."""
        while self._arrivals and self._arrivals[0] <= now:
            heapq.heappop(self._arrivals)
        return len(self._arrivals)

    def validate(self, msg: WireMessage) -> bool:
        """Gateway filter: reject messages truncated past critical fields."""
        return msg.is_valid

    def transit(self, msg: WireMessage, t_send: SimTime, rng: RngStream) -> Optional[SimTime]:
        """Engine arrival time of ``msg`` sent at ``t_send``, or None if dropped."""
        if not self.validate(msg):
            logger.warning(
                f"Gateway {self.id} dropped message {msg.message_id} from {msg.participant}: "
                "truncated beyond critical fields"
            )
            return None
        delay = self.latency.sample(rng, msg.participant)
        if self.switch is not None:
            delay += self.switch.forward(msg.size_bytes, msg.truncated)
        delay += self.speedbump_ns
        if self.load_penalty:
            delay += self.load_penalty * self.in_flight(t_send)
        arrival = t_send + delay
        if self.load_penalty:
            heapq.heappush(self._arrivals, arrival)
        return arrival

    def minimum_delay(self, endpoint: Optional[str] = None) -> SimTime:
        """Smallest possible transit for messages from ``endpoint``."""
        return self.latency.minimum(endpoint) + self.speedbump_ns


def gateway_transit(gw: Gateway, msg: WireMessage, t_send: SimTime, rng: RngStream) -> Optional[SimTime]:
    """Send ``msg`` through ``gw`` at ``t_send``; returns the engine arrival time."""
    return gw.transit(msg, t_send, rng)


class SessionRegistry:
    """Tracks participant sessions per gateway and enforces a connection limit.

    Sessions are granted in login order; once a participant holds ``limit``
    sessions further logins are refused and messages sent over them rejected.
    """

    def __init__(self, limit: Optional[int] = None):
        self.limit = limit
        self._sessions: Dict[str, List[str]] = {}
        self._rejected: Dict[str, Set[str]] = {}
        self.rejected_messages = 0
        self.logger = logging.getLogger(f"{__name__}.{self.__class__.__name__}")

    def login(self, participant: str, gateway_id: str) -> bool:
        sessions = self._sessions.setdefault(participant, [])
        if gateway_id in sessions:
            return True
        if self.limit is not None and len(sessions) >= self.limit:
            self._rejected.setdefault(participant, set()).add(gateway_id)
            self.logger.warning(
                f"Connection limit {self.limit} reached: refused session for {participant} on {gateway_id}"
            )
            return False
        sessions.append(gateway_id)
        return True

    def sessions(self, participant: str) -> List[str]:
        return list(self._sessions.get(participant, []))

    def accepts(self, participant: str, gateway_id: str) -> bool:
        """Whether a message from ``participant`` may enter ``gateway_id``."""
        if gateway_id in self._sessions.get(participant, []):
            return True
        self.rejected_messages += 1
        self.logger.debug(f"Rejected copy from {participant} on {gateway_id}: no session")
        return False
