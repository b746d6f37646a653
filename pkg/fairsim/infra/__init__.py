"""Everything between a participant's machine and the matching engine."""

from fairsim.infra.errors import InfrastructureError, InvalidMessageError, TopologyError
from fairsim.infra.feed import (
    Delivery,
    FeedKind,
    FeedPolicy,
    FeedServer,
    MarketUpdate,
    disseminate,
)
from fairsim.infra.fragments import (
    DEFAULT_MTU,
    DEFAULT_REASSEMBLY_TIMEOUT,
    Fragment,
    FragmentSend,
    Reassembler,
    ReassemblyOutcome,
    ReassemblyStatus,
    TimestampPolicy,
    fragment_and_send,
    fragment_count,
)
from fairsim.infra.gateway import Gateway, SessionRegistry, gateway_transit
from fairsim.infra.latency import LatencyKind, LatencyModel
from fairsim.infra.routing import InterBookLink, route_cross_book
from fairsim.infra.switch import StoreAndForwardSwitch, switch_forward
from fairsim.infra.wire import DEFAULT_MESSAGE_BYTES, WireMessage

__all__ = [
    "InfrastructureError",
    "InvalidMessageError",
    "TopologyError",
    "Delivery",
    "FeedKind",
    "FeedPolicy",
    "FeedServer",
    "MarketUpdate",
    "disseminate",
    "DEFAULT_MTU",
    "DEFAULT_REASSEMBLY_TIMEOUT",
    "Fragment",
    "FragmentSend",
    "Reassembler",
    "ReassemblyOutcome",
    "ReassemblyStatus",
    "TimestampPolicy",
    "fragment_and_send",
    "fragment_count",
    "Gateway",
    "SessionRegistry",
    "gateway_transit",
    "LatencyKind",
    "LatencyModel",
    "InterBookLink",
    "route_cross_book",
    "StoreAndForwardSwitch",
    "switch_forward",
    "DEFAULT_MESSAGE_BYTES",
    "WireMessage",
]
