"""Unit tests for participant strategies."""

import itertools

import pytest

from fairsim.book.models import Cancel, OrderKind, Side
from fairsim.infra.feed import MarketUpdate
from fairsim.kernel.rng import RngStream
from fairsim.participants.models import (
    Decision,
    Opportunity,
    Participant,
    Stimulus,
    StrategyError,
    StrategyKind,
)
from fairsim.participants.strategies import (
    HonestRacer,
    OptimisticMessenger,
    Replicator,
    RestingMaker,
    Truncator,
    build_agent,
    on_update,
    optimistic_dispatch,
    replicate_dispatch,
)


UPDATE = MarketUpdate(update_id=1, book="main", t_event=1000, stimulus_id=3,
                      side=Side.ASK, price=100, qty=1, order_id=50)
STIMULUS = Stimulus(id=3, t_e=1_000_000, opportunity=Opportunity("main", Side.ASK, 100))


def participant(strategy=StrategyKind.HONEST_RACER, gateways=("gw1",), **kwargs):
    kwargs.setdefault("reaction_time", 5000)
    return Participant(id="p", strategy=strategy, connections=tuple(gateways), **kwargs)


def ids():
    counter = itertools.count(100)
    return lambda: next(counter)


def wire_for(p):
    agent = HonestRacer(p, ids())
    return agent.wire(agent.taker_order(UPDATE))


@pytest.mark.unit
class TestHonestRacer:
    """Reaction-time bound and the order it sends."""

    def test_sends_market_order_after_reaction_time(self):
        agent = HonestRacer(participant(), ids())
        (dispatch,) = on_update(agent, UPDATE, 2000)
        order = dispatch.wire.message
        assert dispatch.t_send == 7000
        assert dispatch.gateway_id == "gw1"
        assert order.kind is OrderKind.MARKET
        assert order.side is Side.BID
        assert order.stimulus_id == 3

    def test_ignores_updates_without_liquidity(self):
        agent = HonestRacer(participant(), ids())
        update = MarketUpdate(update_id=2, book="main", t_event=0)
        assert on_update(agent, update, 10) == []

    def test_sending_early_is_rejected(self):
        class Cheater(HonestRacer):
            def respond(self, update, t_receive):
                return [self.single(self.wire(self.taker_order(update)), "gw1", t_receive)]

        with pytest.raises(StrategyError, match="before"):
            on_update(Cheater(participant(), ids()), UPDATE, 2000)

    def test_no_gateway_raises(self):
        agent = HonestRacer(participant(gateways=()), ids())
        with pytest.raises(StrategyError):
            _ = agent.primary_gateway

    def test_negative_reaction_time_rejected(self):
        with pytest.raises(StrategyError):
            participant(reaction_time=-1)


@pytest.mark.unit
class TestReplicator:
    """One copy per gateway connection."""

    def test_copies_share_identity_and_send_time(self):
        p = participant(StrategyKind.REPLICATOR, gateways=("gw1", "gw2", "gw3"))
        dispatches = on_update(Replicator(p, ids()), UPDATE, 0)
        assert [d.gateway_id for d in dispatches] == ["gw1", "gw2", "gw3"]
        assert [d.wire.copy_index for d in dispatches] == [0, 1, 2]
        assert {d.wire.dedup_key() for d in dispatches} == {("p", 100)}
        assert {d.t_send for d in dispatches} == {5000}

    def test_requires_two_connections(self):
        p = participant(StrategyKind.REPLICATOR)
        with pytest.raises(StrategyError):
            replicate_dispatch(p, wire_for(p), 0)


@pytest.mark.unit
class TestTruncator:
    """Wire size and validity of truncated orders."""

    def test_truncated_but_valid(self):
        p = participant(StrategyKind.TRUNCATOR, message_bytes=200, truncated_bytes=64)
        (dispatch,) = on_update(Truncator(p, ids()), UPDATE, 0)
        assert dispatch.wire.size_bytes == 64
        assert dispatch.wire.truncated
        assert dispatch.wire.is_valid

    def test_critical_truncation_is_invalid(self):
        p = participant(StrategyKind.TRUNCATOR, message_bytes=200, truncated_bytes=32,
                        truncate_critical=True)
        (dispatch,) = on_update(Truncator(p, ids()), UPDATE, 0)
        assert not dispatch.wire.is_valid


@pytest.mark.unit
class TestRestingMaker:
    """Cancelling stale quotes."""

    def test_cancels_registered_quote_once(self):
        maker = RestingMaker(participant(StrategyKind.RESTING_MAKER), ids())
        maker.register_quote(50, stimulus_id=3)
        (dispatch,) = on_update(maker, UPDATE, 1000)
        cancel = dispatch.wire.message
        assert isinstance(cancel, Cancel)
        assert cancel.target_order_id == 50
        assert dispatch.t_send == 6000
        assert on_update(maker, UPDATE, 1000) == []

    def test_ignores_other_orders(self):
        maker = RestingMaker(participant(StrategyKind.RESTING_MAKER), ids())
        maker.register_quote(51)
        assert on_update(maker, UPDATE, 1000) == []


@pytest.mark.unit
class TestOptimisticMessenger:
    """Pre-positioned first fragments."""

    def messenger(self, abort_rate=0.0, seed=0):
        p = participant(StrategyKind.OPTIMISTIC_MESSENGER, message_bytes=3000,
                        lead_ns=2000, abort_rate=abort_rate)
        return OptimisticMessenger(p, ids(), RngStream(seed, "opt"))

    def test_first_fragment_leaves_before_event(self):
        agent = self.messenger()
        (dispatch,) = agent.anticipate(STIMULUS)
        assert [s.t_send for s in dispatch.sends] == [STIMULUS.t_e - 2000]
        assert dispatch.sends[0].fragment.index == 0

    def test_remaining_fragments_follow_reaction(self):
        agent = self.messenger()
        agent.anticipate(STIMULUS)
        update = MarketUpdate(1, "main", STIMULUS.t_e, stimulus_id=3, side=Side.ASK, price=100, qty=1)
        (dispatch,) = on_update(agent, update, STIMULUS.t_e + 100)
        assert [s.fragment.index for s in dispatch.sends] == [1]
        assert dispatch.sends[0].t_send == STIMULUS.t_e + 5100
        assert dispatch.sends[0].fragment.valid_checksum

    def test_abort_invalidates_remaining_fragments(self):
        agent = self.messenger(abort_rate=1.0)
        agent.anticipate(STIMULUS)
        update = MarketUpdate(1, "main", STIMULUS.t_e, stimulus_id=3, side=Side.ASK, price=100, qty=1)
        (dispatch,) = on_update(agent, update, STIMULUS.t_e)
        assert not dispatch.sends[0].fragment.valid_checksum
        assert agent.aborted == 1

    def test_unanticipated_update_ignored(self):
        assert on_update(self.messenger(), UPDATE, 0) == []

    def test_dispatch_preconditions(self):
        p = participant(StrategyKind.OPTIMISTIC_MESSENGER, message_bytes=3000, lead_ns=2000)
        wire = wire_for(p)
        with pytest.raises(StrategyError, match="Lead"):
            optimistic_dispatch(p, wire, STIMULUS, 0, Decision.TRADE)
        small = participant(StrategyKind.OPTIMISTIC_MESSENGER, message_bytes=200, lead_ns=2000)
        small_wire = wire_for(small)
        with pytest.raises(StrategyError, match="fits one fragment"):
            optimistic_dispatch(small, small_wire, STIMULUS, 2000, Decision.TRADE)
        with pytest.raises(StrategyError, match="not an optimistic"):
            optimistic_dispatch(participant(), wire, STIMULUS, 2000, Decision.TRADE)


@pytest.mark.unit
class TestBuildAgent:
    """Strategy registry."""

    @pytest.mark.parametrize("kind", list(StrategyKind))
    def test_every_strategy_builds(self, kind):
        agent = build_agent(participant(kind, gateways=("gw1", "gw2")), ids())
        assert agent.id == "p"
