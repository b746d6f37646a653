"""Inter-book routing for exchanges with a decentralized order book."""

import logging
from dataclasses import dataclass, field
from typing import Optional

from fairsim.book.models import NewOrder, Side
from fairsim.book.order_book import OrderBook
from fairsim.infra.latency import LatencyModel
from fairsim.kernel.rng import RngStream
from fairsim.kernel.time import SimTime


logger = logging.getLogger(__name__)


@dataclass
class InterBookLink:
    """Direct link the exchange uses to forward orders between book nodes."""
    id: str
    source: str
    destination: str
    latency: LatencyModel = field(default_factory=LatencyModel)
    speedbump_ns: SimTime = 0

    def transit(self, rng: RngStream) -> SimTime:
        return self.latency.sample(rng) + self.speedbump_ns


def better_remote_price(order: NewOrder, from_book: OrderBook, to_book: OrderBook) -> bool:
    """True if the opposite side's best price for ``order`` is at ``to_book``."""
    remote = to_book.best_price(order.side.opposite)
    if remote is None:
        return False
    local = from_book.best_price(order.side.opposite)
    if local is None:
        return True
    return remote < local if order.side is Side.BID else remote > local


def route_cross_book(
    order: NewOrder,
    from_book: OrderBook,
    to_book: OrderBook,
    inter_book_link: InterBookLink,
    t: SimTime,
    rng: RngStream,
) -> Optional[SimTime]:
    """Forward ``order`` to the remote book when it holds the best price.

    Args:
        order: Order received at ``from_book`` at time ``t``
        from_book: Local book
        to_book: Remote book
        inter_book_link: Link between the two book nodes
        t: Local arrival time
        rng: The link's random stream

    Returns:
        Arrival time at the remote engine, or None if the order stays local
    """
    if not better_remote_price(order, from_book, to_book):
        return None
    arrival = t + inter_book_link.transit(rng)
    logger.debug(
        f"Routing order {order.order_id} {inter_book_link.source}->{inter_book_link.destination}, "
        f"arrives {arrival}"
    )
    return arrival
