"""Limit order book and matching."""

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
from fairsim.book.order_book import InvalidOrderError, OrderBook, OrderBookError, PriceLevel

__all__ = [
    "BatchResult",
    "BookDelta",
    "BookSnapshot",
    "Cancel",
    "LevelSnapshot",
    "MatchResult",
    "Message",
    "NewOrder",
    "Order",
    "OrderKind",
    "RestingOrderView",
    "Side",
    "Trade",
    "InvalidOrderError",
    "OrderBook",
    "OrderBookError",
    "PriceLevel",
]
