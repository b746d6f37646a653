"""Unit tests for inter-book routing."""

import pytest

from fairsim.book.models import NewOrder, OrderKind, Side
from fairsim.book.order_book import OrderBook
from fairsim.infra.latency import LatencyModel
from fairsim.infra.routing import InterBookLink, route_cross_book
from fairsim.kernel.time import MS
from fairsim.remediation.policies import apply_speedbump


LINK = InterBookLink("exchange_link", "london", "ny", LatencyModel.constant(30 * MS))


def books(local_ask=None, remote_ask=None):
    local, remote = OrderBook("london"), OrderBook("ny")
    if local_ask is not None:
        local.process_message(NewOrder(1, "x", Side.ASK, 1, local_ask, OrderKind.LIMIT), 0)
    if remote_ask is not None:
        remote.process_message(NewOrder(2, "x", Side.ASK, 1, remote_ask, OrderKind.LIMIT), 0)
    return local, remote


BUY = NewOrder(9, "router", Side.BID, 1, kind=OrderKind.MARKET)


@pytest.mark.unit
class TestRouteCrossBook:
    """Forwarding to the book holding the better price."""

    def test_routes_when_remote_is_better(self, rng):
        local, remote = books(local_ask=101, remote_ask=100)
        assert route_cross_book(BUY, local, remote, LINK, 5 * MS, rng) == 35 * MS

    def test_routes_when_local_side_empty(self, rng):
        local, remote = books(remote_ask=100)
        assert route_cross_book(BUY, local, remote, LINK, 0, rng) == 30 * MS

    def test_stays_local_when_not_better(self, rng):
        local, remote = books(local_ask=100, remote_ask=100)
        assert route_cross_book(BUY, local, remote, LINK, 0, rng) is None

    def test_stays_local_without_remote_liquidity(self, rng):
        local, remote = books(local_ask=100)
        assert route_cross_book(BUY, local, remote, LINK, 0, rng) is None

    def test_speedbump_on_link(self, rng):
        local, remote = books(remote_ask=100)
        bumped = apply_speedbump(LINK, MS)
        assert route_cross_book(BUY, local, remote, bumped, 0, rng) == 31 * MS
