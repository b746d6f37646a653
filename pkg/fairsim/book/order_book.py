"""Limit order book with price-time priority matching."""

import logging
from collections import deque
from typing import Deque, Dict, Iterable, List, Optional, Sequence, Tuple

from sortedcontainers import SortedDict

from fairsim.book.models import (
    BatchResult,
    BookDelta,
    BookSnapshot,
    Cancel,
    LevelSnapshot,
    MatchResult,
    Message,
    NewOrder,
    Order,
    OrderKind,
    RestingOrderView,
    Side,
    Trade,
)
from fairsim.kernel.rng import RngStream
from fairsim.kernel.time import SimTime


logger = logging.getLogger(__name__)


class OrderBookError(Exception):
    """Base exception for order book errors."""
    pass


class InvalidOrderError(OrderBookError):
    """A message failed the book's own sanity checks."""
    pass


class PriceLevel:
    """FIFO queue of resting orders at one price, sorted by engine_seq."""

    def __init__(self, price: int):
        self.price = price
        self.queue: Deque[Order] = deque()

    def __len__(self) -> int:
        return len(self.queue)

    def __repr__(self) -> str:
        return f"PriceLevel(price={self.price}, orders={len(self.queue)})"

    @property
    def head(self) -> Order:
        return self.queue[0]

    @property
    def qty(self) -> int:
        return sum(order.qty for order in self.queue)

    def append(self, order: Order) -> None:
        self.queue.append(order)

    def remove(self, order: Order) -> None:
        self.queue.remove(order)

    def snapshot(self) -> LevelSnapshot:
        return LevelSnapshot(
            price=self.price,
            orders=tuple(
                RestingOrderView(o.id, o.participant, o.qty, o.engine_seq) for o in self.queue
            ),
        )


class OrderBook:
    """Single-instrument limit order book.

    Incoming marketable quantity trades against the opposite side best price
    first and, within a level, strictly in engine_seq order. Self-matching is
    allowed.
    """

    def __init__(self, instrument: str = "default"):
        self.instrument = instrument
        # bids keyed by negated price so index 0 is always the best level
        self._bids: SortedDict = SortedDict(lambda price: -price)
        self._asks: SortedDict = SortedDict()
        self._orders: Dict[int, Order] = {}
        self._next_seq = 0
        self.logger = logging.getLogger(f"{__name__}.{self.__class__.__name__}")

    def __len__(self) -> int:
        return len(self._orders)

    def _side(self, side: Side) -> SortedDict:
        return self._bids if side is Side.BID else self._asks

    @property
    def next_seq(self) -> int:
        return self._next_seq

    def best_bid(self) -> Optional[int]:
        return self._bids.peekitem(0)[0] if self._bids else None

    def best_ask(self) -> Optional[int]:
        return self._asks.peekitem(0)[0] if self._asks else None

    def best_price(self, side: Side) -> Optional[int]:
        return self.best_bid() if side is Side.BID else self.best_ask()

    def is_crossed(self) -> bool:
        bid, ask = self.best_bid(), self.best_ask()
        return bid is not None and ask is not None and bid >= ask

    def resting(self, order_id: int) -> Optional[Order]:
        return self._orders.get(order_id)

    def process_message(self, msg: Message, arrival: SimTime) -> MatchResult:
        """Apply one new-order or cancel message.

        Args:
            msg: Gateway-validated message
            arrival: Engine arrival time; trades are stamped with it

        Returns:
            MatchResult with trades and book delta. A cancel for an order that
            is no longer resting, or that another participant owns, yields
            ``too_late=True`` and changes nothing.
        """
        engine_seq = self._next_seq
        self._next_seq += 1
        if isinstance(msg, Cancel):
            return self._cancel(msg, arrival, engine_seq)
        return self._new_order(msg, arrival, engine_seq)

    def _cancel(self, msg: Cancel, arrival: SimTime, engine_seq: int) -> MatchResult:
        result = MatchResult(message=msg, arrival=arrival, engine_seq=engine_seq)
        order = self._orders.get(msg.target_order_id)
        if order is not None and order.participant != msg.participant:
            self.logger.warning(
                f"Cancel {msg.order_id} from {msg.participant} names order {msg.target_order_id} "
                f"owned by {order.participant}; treated as unknown"
            )
            order = None
        if order is None:
            result.too_late = True
            self.logger.debug(
                f"Cancel {msg.order_id} from {msg.participant} too late for order {msg.target_order_id}"
            )
            return result
        self._remove(order)
        result.cancelled = order
        result.delta.removed.append(order.id)
        return result

    def _new_order(self, msg: NewOrder, arrival: SimTime, engine_seq: int) -> MatchResult:
        if msg.qty <= 0:
            raise InvalidOrderError(f"Order {msg.order_id} has non-positive qty {msg.qty}")
        if msg.kind is OrderKind.LIMIT and msg.price is None:
            raise InvalidOrderError(f"Limit order {msg.order_id} has no price")

        result = MatchResult(message=msg, arrival=arrival, engine_seq=engine_seq)
        remaining = msg.qty
        opposite = self._side(msg.side.opposite)

        while remaining > 0 and opposite:
            level_price, level = opposite.peekitem(0)
            if msg.kind is OrderKind.LIMIT and not self._marketable(msg.side, msg.price, level_price):
                break
            maker = level.head
            fill = min(remaining, maker.qty)
            result.trades.append(
                Trade(
                    taker_order=msg.order_id,
                    maker_order=maker.id,
                    price=maker.price,
                    qty=fill,
                    at=arrival,
                    taker_participant=msg.participant,
                    maker_participant=maker.participant,
                    maker_side=maker.side,
                    maker_seq=maker.engine_seq,
                )
            )
            remaining -= fill
            maker.qty -= fill
            if maker.qty == 0:
                self._remove(maker)
                result.delta.removed.append(maker.id)
            else:
                result.delta.reduced.append((maker.id, maker.qty))

        if remaining > 0 and msg.kind is OrderKind.LIMIT:
            order = Order(
                id=msg.order_id,
                participant=msg.participant,
                side=msg.side,
                price=msg.price,  # type: ignore[arg-type]
                qty=remaining,
                engine_arrival=arrival,
                engine_seq=engine_seq,
            )
            self._rest(order)
            result.delta.rested.append(order.id)
        return result

    @staticmethod
    def _marketable(side: Side, limit: Optional[int], level_price: int) -> bool:
        if limit is None:
            return True
        return level_price <= limit if side is Side.BID else level_price >= limit

    def _rest(self, order: Order) -> None:
        side = self._side(order.side)
        level = side.get(order.price)
        if level is None:
            level = PriceLevel(order.price)
            side[order.price] = level
        level.append(order)
        self._orders[order.id] = order

    def _remove(self, order: Order) -> None:
        side = self._side(order.side)
        level = side[order.price]
        level.remove(order)
        if not level:
            del side[order.price]
        del self._orders[order.id]

    def batch_process(
        self,
        window: SimTime,
        msgs: Sequence[Tuple[Message, SimTime]],
        rng: RngStream,
        close_at: Optional[SimTime] = None,
        phase: SimTime = 0,
    ) -> BatchResult:
        """Match one batch window's messages in uniformly random order.

        Args:
            window: Window length W
            msgs: ``(message, arrival)`` pairs that arrived in one window
            rng: The window matcher's random stream
            close_at: Time trades are stamped with (defaults to window end)
            phase: Offset of the window grid from session start

        Returns:
            BatchResult with one MatchResult per message, in processing order

        Raises:
            OrderBookError: If the messages span more than one window
        """
        if not msgs:
            return BatchResult()
        if window > 0:
            indices = {(arrival - phase) // window for _, arrival in msgs}
            if len(indices) > 1:
                raise OrderBookError(f"Batch spans windows {sorted(indices)}")
            if close_at is None:
                close_at = phase + (indices.pop() + 1) * window
        if close_at is None:
            close_at = max(arrival for _, arrival in msgs)

        ordered = list(msgs) if len(msgs) == 1 else rng.shuffled(list(msgs))
        batch = BatchResult()
        for msg, _arrival in ordered:
            batch.results.append(self.process_message(msg, close_at))
        return batch

    def snapshot(self) -> BookSnapshot:
        """Read-only copy of both sides."""
        return BookSnapshot(
            bids=tuple(level.snapshot() for level in self._bids.values()),
            asks=tuple(level.snapshot() for level in self._asks.values()),
        )

    def orders(self) -> Iterable[Order]:
        return list(self._orders.values())

    def depth(self, side: Side) -> List[Tuple[int, int]]:
        """``(price, qty)`` per level, best first."""
        return [(price, level.qty) for price, level in self._side(side).items()]
