"""Participant and stimulus domain types."""

from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional, Tuple

from fairsim.book.models import Side
from fairsim.infra.fragments import FragmentSend
from fairsim.infra.wire import DEFAULT_MESSAGE_BYTES, WireMessage
from fairsim.kernel.time import SimTime


class StrategyError(Exception):
    """A strategy operation was called outside its preconditions."""
    pass


class StrategyKind(str, Enum):
    HONEST_RACER = "honest-racer"
    REPLICATOR = "replicator"
    OPTIMISTIC_MESSENGER = "optimistic-messenger"
    EARLY_LOGIN = "early-login"
    FAST_LINK_SNIPER = "fast-link-sniper"
    RESTING_MAKER = "resting-maker"
    TRUNCATOR = "truncator"


class Decision(str, Enum):
    """Optimistic messenger's post-event choice."""
    TRADE = "trade"
    ABORT = "abort"


@dataclass(frozen=True)
class Participant:
    """A trading participant with a fixed reaction time.

    ``reaction_time`` is ground truth known to the auditor only.
    """
    id: str
    reaction_time: SimTime
    strategy: StrategyKind = StrategyKind.HONEST_RACER
    connections: Tuple[str, ...] = ()
    feed_subscription: Optional[str] = None
    colocated: bool = True
    message_bytes: int = DEFAULT_MESSAGE_BYTES
    lead_ns: SimTime = 0
    abort_rate: float = 0.0
    truncated_bytes: Optional[int] = None
    truncate_critical: bool = False
    squat_slots: int = 0

    def __post_init__(self) -> None:
        if self.reaction_time < 0:
            raise StrategyError(f"Participant {self.id} has negative reaction time")


class StimulusKind(str, Enum):
    OPPORTUNITY = "opportunity"
    STALE_QUOTE = "stale_quote"
    ROUTED_ORDER = "routed_order"


@dataclass(frozen=True)
class Opportunity:
    """Resting liquidity the stimulus makes capturable."""
    book: str
    side: Side
    price: int
    qty: int = 1


@dataclass(frozen=True)
class Stimulus:
    """A market event that starts one race.

    Every order submitted in response carries ``id`` as its stimulus tag.
    """
    id: int
    t_e: SimTime
    opportunity: Opportunity
    kind: StimulusKind = StimulusKind.OPPORTUNITY
    owner: Optional[str] = None
    horizon: SimTime = 0

    @property
    def closes_at(self) -> SimTime:
        return self.t_e + self.horizon


@dataclass
class Dispatch:
    """One copy of a message headed for one gateway, fragment by fragment."""
    wire: WireMessage
    gateway_id: str
    sends: List[FragmentSend] = field(default_factory=list)

    @property
    def t_send(self) -> SimTime:
        return self.sends[0].t_send if self.sends else -1

    @property
    def participant(self) -> str:
        return self.wire.participant
