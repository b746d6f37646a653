"""Order book domain types: messages, resting orders, trades and snapshots."""

from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional, Tuple, Union

from fairsim.kernel.time import SimTime


class Side(str, Enum):
    """Book side an order rests on."""
    BID = "bid"
    ASK = "ask"

    @property
    def opposite(self) -> "Side":
        return Side.ASK if self is Side.BID else Side.BID


class OrderKind(str, Enum):
    """Message kinds the engine accepts for new orders."""
    LIMIT = "limit"
    MARKET = "market"


@dataclass(frozen=True)
class NewOrder:
    """A new limit or market order.

    ``stimulus_id`` is a simulator-level tag; matching never reads it.
    """
    order_id: int
    participant: str
    side: Side
    qty: int
    price: Optional[int] = None
    kind: OrderKind = OrderKind.LIMIT
    stimulus_id: Optional[int] = None


@dataclass(frozen=True)
class Cancel:
    """Cancel a resting order. ``order_id`` identifies this message itself."""
    order_id: int
    participant: str
    target_order_id: int
    stimulus_id: Optional[int] = None


Message = Union[NewOrder, Cancel]


@dataclass
class Order:
    """A resting order."""
    id: int
    participant: str
    side: Side
    price: int
    qty: int
    engine_arrival: SimTime
    engine_seq: int


@dataclass(frozen=True)
class Trade:
    """One fill. Executes at the maker's resting price."""
    taker_order: int
    maker_order: int
    price: int
    qty: int
    at: SimTime
    taker_participant: str = ""
    maker_participant: str = ""
    maker_side: Side = Side.ASK
    maker_seq: int = -1

    def to_row(self) -> Tuple[int, int, int, int, int]:
        """Row for trades.csv: time_ns, taker_id, maker_id, price_ticks, qty."""
        return (self.at, self.taker_order, self.maker_order, self.price, self.qty)


@dataclass
class BookDelta:
    """Changes a message (or batch) made to the book."""
    rested: List[int] = field(default_factory=list)
    removed: List[int] = field(default_factory=list)
    reduced: List[Tuple[int, int]] = field(default_factory=list)

    def merge(self, other: "BookDelta") -> None:
        self.rested.extend(other.rested)
        self.removed.extend(other.removed)
        self.reduced.extend(other.reduced)

    @property
    def empty(self) -> bool:
        return not (self.rested or self.removed or self.reduced)


@dataclass
class MatchResult:
    """Outcome of processing one message."""
    message: Message
    arrival: SimTime
    engine_seq: int
    trades: List[Trade] = field(default_factory=list)
    delta: BookDelta = field(default_factory=BookDelta)
    too_late: bool = False
    cancelled: Optional[Order] = None

    @property
    def filled_qty(self) -> int:
        return sum(trade.qty for trade in self.trades)


@dataclass
class BatchResult:
    """Outcome of one batch window, per message in processing order."""
    results: List[MatchResult] = field(default_factory=list)

    @property
    def trades(self) -> List[Trade]:
        return [trade for result in self.results for trade in result.trades]

    @property
    def delta(self) -> BookDelta:
        merged = BookDelta()
        for result in self.results:
            merged.merge(result.delta)
        return merged


@dataclass(frozen=True)
class RestingOrderView:
    order_id: int
    participant: str
    qty: int
    engine_seq: int


@dataclass(frozen=True)
class LevelSnapshot:
    price: int
    orders: Tuple[RestingOrderView, ...]

    @property
    def qty(self) -> int:
        return sum(order.qty for order in self.orders)


@dataclass(frozen=True)
class BookSnapshot:
    """Value copy of both sides, best price first."""
    bids: Tuple[LevelSnapshot, ...] = ()
    asks: Tuple[LevelSnapshot, ...] = ()

    @property
    def best_bid(self) -> Optional[LevelSnapshot]:
        return self.bids[0] if self.bids else None

    @property
    def best_ask(self) -> Optional[LevelSnapshot]:
        return self.asks[0] if self.asks else None
