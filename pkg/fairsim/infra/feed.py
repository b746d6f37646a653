"""Market-data feed servers and dissemination policies."""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional, Sequence

from fairsim.book.models import Side
from fairsim.infra.errors import InfrastructureError
from fairsim.infra.latency import LatencyModel
from fairsim.kernel.rng import RngStream
from fairsim.kernel.time import SimTime


logger = logging.getLogger(__name__)

SQUAT_PREFIX = "~squat"


class FeedKind(str, Enum):
    """How a feed server pushes one update to its subscribers."""
    SEQUENTIAL_BY_LOGIN = "sequential-by-login"
    RANDOMIZED_SEQUENTIAL = "randomized-sequential"
    MULTICAST_JITTER = "multicast-jitter"


@dataclass(frozen=True)
class FeedPolicy:
    kind: FeedKind = FeedKind.MULTICAST_JITTER
    per_recipient_cost: SimTime = 0
    jitter: LatencyModel = field(default_factory=LatencyModel)


@dataclass(frozen=True)
class MarketUpdate:
    """A book event pushed to subscribers.

    ``side``/``price``/``qty``/``order_id`` name the resting liquidity the
    event made capturable.
    """
    update_id: int
    book: str
    t_event: SimTime
    stimulus_id: Optional[int] = None
    side: Optional[Side] = None
    price: Optional[int] = None
    qty: int = 0
    order_id: Optional[int] = None


@dataclass(frozen=True)
class Delivery:
    update_id: int
    participant: str
    t_event: SimTime
    t_receive: SimTime

    @property
    def delay(self) -> SimTime:
        return self.t_receive - self.t_event


def is_squat_session(session: str) -> bool:
    return session.startswith(SQUAT_PREFIX)


def disseminate(
    update: MarketUpdate,
    recipients: Sequence[str],
    policy: FeedPolicy,
    rng: RngStream,
) -> List[Delivery]:
    """Delivery time of ``update`` at every recipient.

    Args:
        update: The update, published at ``update.t_event``
        recipients: Sessions ordered by login (squat placeholders included)
        policy: Feed server policy
        rng: The feed server's random stream

    Returns:
        One Delivery per recipient session, in transmission order

    Raises:
        InfrastructureError: If there are no recipients
    """
    if not recipients:
        raise InfrastructureError(f"Update {update.update_id} has no recipients")
    t = update.t_event

    if policy.kind is FeedKind.MULTICAST_JITTER:
        return [
            Delivery(update.update_id, r, t, t + policy.jitter.sample(rng, r)) for r in recipients
        ]

    order = list(recipients)
    if policy.kind is FeedKind.RANDOMIZED_SEQUENTIAL:
        order = rng.shuffled(order)
    return [
        Delivery(update.update_id, r, t, t + k * policy.per_recipient_cost)
        for k, r in enumerate(order, start=1)
    ]


class FeedServer:
    """Update server keeping its own login order.

    Participants occupying extra idle sessions ("squatting") push every later
    login back by one transmission slot per squatted session.
    """

    def __init__(self, server_id: str, book: str, policy: FeedPolicy):
        self.id = server_id
        self.book = book
        self.policy = policy
        self._sessions: List[str] = []
        self.logger = logging.getLogger(f"{__name__}.{self.__class__.__name__}")

    @property
    def login_order(self) -> List[str]:
        """Real subscribers in login order."""
        return [s for s in self._sessions if not is_squat_session(s)]

    @property
    def sessions(self) -> List[str]:
        return list(self._sessions)

    def login(self, participant: str, squat_slots: int = 0) -> None:
        if participant in self._sessions:
            self.logger.warning(f"{participant} already logged in to feed {self.id}")
            return
        self._sessions.append(participant)
        for i in range(squat_slots):
            self._sessions.append(f"{SQUAT_PREFIX}:{participant}:{i}")
        if squat_slots:
            self.logger.info(f"{participant} holds {squat_slots} idle sessions on feed {self.id}")

    def publish(self, update: MarketUpdate, rng: RngStream) -> List[Delivery]:
        """Disseminate ``update``; squat sessions are dropped from the result."""
        if not self._sessions:
            return []
        deliveries = disseminate(update, self._sessions, self.policy, rng)
        return [d for d in deliveries if not is_squat_session(d.participant)]
