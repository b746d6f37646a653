"""Participant strategies: passive callbacks invoked by the simulation."""

import logging
from abc import ABC, abstractmethod
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Type

from fairsim.book.models import Cancel, NewOrder, OrderKind
from fairsim.infra.feed import MarketUpdate
from fairsim.infra.fragments import DEFAULT_MTU, FragmentSend, fragment_and_send, fragment_count
from fairsim.infra.wire import WireMessage
from fairsim.kernel.rng import RngStream
from fairsim.kernel.time import SimTime
from fairsim.participants.models import (
    Decision,
    Dispatch,
    Participant,
    Stimulus,
    StrategyError,
    StrategyKind,
)


logger = logging.getLogger(__name__)

OrderIds = Callable[[], int]


class Agent(ABC):
    """Base class for all strategies.

    An agent never acts on an update before ``t_receive + reaction_time``.
    """

    def __init__(self, participant: Participant, order_ids: OrderIds,
                 rng: Optional[RngStream] = None, mtu: int = DEFAULT_MTU):
        self.participant = participant
        self.order_ids = order_ids
        self.rng = rng
        self.mtu = mtu
        self.logger = logging.getLogger(f"{__name__}.{self.__class__.__name__}")

    @property
    def id(self) -> str:
        return self.participant.id

    @property
    def reaction_time(self) -> SimTime:
        return self.participant.reaction_time

    @property
    def primary_gateway(self) -> str:
        if not self.participant.connections:
            raise StrategyError(f"Participant {self.id} has no gateway connections")
        return self.participant.connections[0]

    def anticipate(self, stimulus: Stimulus) -> List[Dispatch]:
        """Pre-positioning before a scripted event; most strategies do nothing."""
        return []

    @abstractmethod
    def respond(self, update: MarketUpdate, t_receive: SimTime) -> List[Dispatch]:
        """Messages sent in reaction to ``update`` received at ``t_receive``."""

    def taker_order(self, update: MarketUpdate) -> NewOrder:
        """Market order lifting the liquidity named by ``update``."""
        if update.side is None:
            raise StrategyError(f"Update {update.update_id} names no capturable side")
        return NewOrder(
            order_id=self.order_ids(),
            participant=self.id,
            side=update.side.opposite,
            qty=max(update.qty, 1),
            kind=OrderKind.MARKET,
            stimulus_id=update.stimulus_id,
        )

    def wire(self, order: NewOrder, copy_index: int = 0) -> WireMessage:
        return WireMessage(order, size_bytes=self.participant.message_bytes, copy_index=copy_index)

    def single(self, wire: WireMessage, gateway_id: str, t_send: SimTime) -> Dispatch:
        return Dispatch(wire, gateway_id, fragment_and_send(wire, self.mtu, [t_send]))


def on_update(agent: Agent, update: MarketUpdate, t_receive: SimTime) -> List[Dispatch]:
    """Dispatch an update to ``agent``'s strategy."""
    dispatches = agent.respond(update, t_receive)
    earliest = t_receive + agent.reaction_time
    for dispatch in dispatches:
        for send in dispatch.sends:
            if send.t_send < earliest:
                raise StrategyError(
                    f"{agent.id} sent fragment {send.fragment.index} at {send.t_send} before {earliest}"
                )
    return dispatches


class HonestRacer(Agent):
    """Sends one market order through its first gateway after its reaction time."""

    def respond(self, update: MarketUpdate, t_receive: SimTime) -> List[Dispatch]:
        if update.side is None:
            return []
        t_send = t_receive + self.reaction_time
        return [self.single(self.wire(self.taker_order(update)), self.primary_gateway, t_send)]


class EarlyLoginRacer(HonestRacer):
    """Honest racer that logs in to its feed server before everyone else."""
    pass


class FastLinkSniper(HonestRacer):
    """Honest racer whose connection is a private link to a remote book."""
    pass


class Truncator(HonestRacer):
    """Honest racer cutting fields from its orders so switches forward them sooner."""

    def wire(self, order: NewOrder, copy_index: int = 0) -> WireMessage:
        size = self.participant.truncated_bytes or self.participant.message_bytes
        return WireMessage(
            order,
            size_bytes=size,
            truncated=size < self.participant.message_bytes,
            critical_intact=not self.participant.truncate_critical,
            copy_index=copy_index,
        )


def replicate_dispatch(p: Participant, wire: WireMessage, t_send: SimTime,
                       mtu: int = DEFAULT_MTU) -> List[Dispatch]:
    """Identical copies of ``wire`` on every connected gateway at the same time.

    Raises:
        StrategyError: Unless ``p`` is a replicator with at least two connections
    """
    if p.strategy is not StrategyKind.REPLICATOR:
        raise StrategyError(f"{p.id} is not a replicator")
    if len(p.connections) < 2:
        raise StrategyError(f"Replicator {p.id} needs >= 2 gateway connections")
    dispatches = []
    for i, gateway_id in enumerate(p.connections):
        copy = WireMessage(wire.message, wire.size_bytes, wire.truncated, wire.critical_intact, i)
        dispatches.append(Dispatch(copy, gateway_id, fragment_and_send(copy, mtu, [t_send])))
    return dispatches


class Replicator(HonestRacer):
    """Broadcasts copies of each order to all of its gateways."""

    def respond(self, update: MarketUpdate, t_receive: SimTime) -> List[Dispatch]:
        if update.side is None:
            return []
        wire = self.wire(self.taker_order(update))
        return replicate_dispatch(self.participant, wire, t_receive + self.reaction_time, self.mtu)


class RestingMaker(Agent):
    """Cancels its own quotes when an update shows them stale."""

    def __init__(self, participant: Participant, order_ids: OrderIds,
                 rng: Optional[RngStream] = None, mtu: int = DEFAULT_MTU):
        super().__init__(participant, order_ids, rng, mtu)
        self.quotes: Dict[int, Optional[int]] = {}

    def register_quote(self, order_id: int, stimulus_id: Optional[int] = None) -> None:
        self.quotes[order_id] = stimulus_id

    def respond(self, update: MarketUpdate, t_receive: SimTime) -> List[Dispatch]:
        if update.order_id not in self.quotes:
            return []
        self.quotes.pop(update.order_id)
        cancel = Cancel(
            order_id=self.order_ids(),
            participant=self.id,
            target_order_id=update.order_id,  # type: ignore[arg-type]
            stimulus_id=update.stimulus_id,
        )
        wire = WireMessage(cancel, size_bytes=self.participant.message_bytes)
        return [self.single(wire, self.primary_gateway, t_receive + self.reaction_time)]


def optimistic_dispatch(
    p: Participant,
    wire: WireMessage,
    anticipated_event: Stimulus,
    lead: SimTime,
    decision: Decision,
    t_react: Optional[SimTime] = None,
    mtu: int = DEFAULT_MTU,
) -> List[FragmentSend]:
    """Full fragment schedule of an optimistically sent order.

    Fragment 1 leaves at ``t_e - lead``; the rest leave at ``t_react`` (default
    ``t_e + r``) and carry invalid checksums when the decision is to abort.

    Raises:
        StrategyError: Unless ``p`` is an optimistic messenger, ``lead > 0``
            and the message spans at least two fragments
    """
    if p.strategy is not StrategyKind.OPTIMISTIC_MESSENGER:
        raise StrategyError(f"{p.id} is not an optimistic messenger")
    if lead <= 0:
        raise StrategyError(f"Lead must be > 0, got {lead}")
    count = fragment_count(wire.size_bytes, mtu)
    if count < 2:
        raise StrategyError(f"Message of {wire.size_bytes} bytes fits one fragment at mtu {mtu}")
    first = anticipated_event.t_e - lead
    rest = t_react if t_react is not None else anticipated_event.t_e + p.reaction_time
    completes = decision is Decision.TRADE
    return fragment_and_send(
        wire, mtu, [first] + [rest] * (count - 1), [True] + [completes] * (count - 1)
    )


class OptimisticMessenger(Agent):
    """Reserves queue priority with a first fragment sent before a scheduled event."""

    def __init__(self, participant: Participant, order_ids: OrderIds,
                 rng: Optional[RngStream] = None, mtu: int = DEFAULT_MTU):
        super().__init__(participant, order_ids, rng, mtu)
        self._pending: Dict[int, Tuple[WireMessage, Stimulus]] = {}
        self.aborted = 0

    def anticipate(self, stimulus: Stimulus) -> List[Dispatch]:
        order = NewOrder(
            order_id=self.order_ids(),
            participant=self.id,
            side=stimulus.opportunity.side.opposite,
            qty=stimulus.opportunity.qty,
            kind=OrderKind.MARKET,
            stimulus_id=stimulus.id,
        )
        wire = self.wire(order)
        schedule = optimistic_dispatch(
            self.participant, wire, stimulus, self.participant.lead_ns, Decision.TRADE, mtu=self.mtu
        )
        self._pending[stimulus.id] = (wire, stimulus)
        return [Dispatch(wire, self.primary_gateway, schedule[:1])]

    def decide(self) -> Decision:
        if self.participant.abort_rate <= 0 or self.rng is None:
            return Decision.TRADE
        return Decision.ABORT if self.rng.random() < self.participant.abort_rate else Decision.TRADE

    def respond(self, update: MarketUpdate, t_receive: SimTime) -> List[Dispatch]:
        pending = self._pending.pop(update.stimulus_id, None) if update.stimulus_id is not None else None
        if pending is None:
            return []
        wire, stimulus = pending
        decision = self.decide()
        if decision is Decision.ABORT:
            self.aborted += 1
        schedule = optimistic_dispatch(
            self.participant, wire, stimulus, self.participant.lead_ns, decision,
            t_react=t_receive + self.reaction_time, mtu=self.mtu,
        )
        return [Dispatch(wire, self.primary_gateway, schedule[1:])]


STRATEGIES: Dict[StrategyKind, Type[Agent]] = {
    StrategyKind.HONEST_RACER: HonestRacer,
    StrategyKind.EARLY_LOGIN: EarlyLoginRacer,
    StrategyKind.FAST_LINK_SNIPER: FastLinkSniper,
    StrategyKind.TRUNCATOR: Truncator,
    StrategyKind.REPLICATOR: Replicator,
    StrategyKind.RESTING_MAKER: RestingMaker,
    StrategyKind.OPTIMISTIC_MESSENGER: OptimisticMessenger,
}


def build_agent(participant: Participant, order_ids: OrderIds,
                rng: Optional[RngStream] = None, mtu: int = DEFAULT_MTU) -> Agent:
    """Instantiate the agent class for ``participant.strategy``."""
    return STRATEGIES[participant.strategy](participant, order_ids, rng, mtu)
