"""Unit tests for market-data dissemination."""

import pytest

from fairsim.infra.errors import InfrastructureError
from fairsim.infra.feed import FeedKind, FeedPolicy, FeedServer, MarketUpdate, disseminate
from fairsim.infra.latency import LatencyModel
from fairsim.kernel.rng import RngStream


UPDATE = MarketUpdate(update_id=1, book="main", t_event=1000, stimulus_id=0)


def sequential(cost=100, kind=FeedKind.SEQUENTIAL_BY_LOGIN):
    return FeedPolicy(kind=kind, per_recipient_cost=cost)


@pytest.mark.unit
class TestDisseminate:
    """Delivery schedules per feed policy."""

    def test_sequential_follows_login_order(self, rng):
        deliveries = disseminate(UPDATE, ["a", "b", "c"], sequential(), rng)
        assert [(d.participant, d.t_receive) for d in deliveries] == [
            ("a", 1100), ("b", 1200), ("c", 1300)
        ]
        assert deliveries[-1].delay == 300

    def test_randomized_sequential_uses_same_slots(self, rng):
        policy = sequential(kind=FeedKind.RANDOMIZED_SEQUENTIAL)
        deliveries = disseminate(UPDATE, ["a", "b", "c"], policy, rng)
        assert sorted(d.t_receive for d in deliveries) == [1100, 1200, 1300]
        assert {d.participant for d in deliveries} == {"a", "b", "c"}

    def test_randomized_order_varies(self):
        rng = RngStream(1, "feed")
        policy = sequential(kind=FeedKind.RANDOMIZED_SEQUENTIAL)
        firsts = {disseminate(UPDATE, ["a", "b"], policy, rng)[0].participant for _ in range(50)}
        assert firsts == {"a", "b"}

    def test_multicast_with_port_offset(self, rng):
        policy = FeedPolicy(jitter=LatencyModel.constant(500, port_offsets={"b": 250}))
        deliveries = {d.participant: d.t_receive for d in disseminate(UPDATE, ["a", "b"], policy, rng)}
        assert deliveries == {"a": 1500, "b": 1750}

    def test_no_recipients_raises(self, rng):
        with pytest.raises(InfrastructureError):
            disseminate(UPDATE, [], sequential(), rng)


@pytest.mark.unit
class TestFeedServer:
    """Login bookkeeping and session squatting."""

    def test_duplicate_login_ignored(self):
        server = FeedServer("feed", "main", sequential())
        server.login("a")
        server.login("a")
        assert server.login_order == ["a"]

    def test_squatting_pushes_later_logins_back(self, rng):
        server = FeedServer("feed", "main", sequential())
        server.login("squatter", squat_slots=2)
        server.login("late")
        deliveries = {d.participant: d.t_receive for d in server.publish(UPDATE, rng)}
        assert deliveries == {"squatter": 1100, "late": 1400}
        assert server.login_order == ["squatter", "late"]
        assert len(server.sessions) == 4

    def test_publish_without_subscribers(self, rng):
        assert FeedServer("feed", "main", sequential()).publish(UPDATE, rng) == []
