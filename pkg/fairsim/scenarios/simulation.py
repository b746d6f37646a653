"""Wires a scenario's components onto one kernel and drives its races."""

import itertools
import logging
from typing import Dict, Iterator, List, Optional, Set, Tuple, TypeVar

from fairsim.auditor.races import RaceRecord, RaceTracker
from fairsim.auditor.requirements import AuditTrail, Submission
from fairsim.book.engine import MatchingEngine
from fairsim.book.models import Cancel, MatchResult, NewOrder, OrderKind, Trade
from fairsim.book.order_book import OrderBook
from fairsim.infra.feed import FeedServer, MarketUpdate
from fairsim.infra.fragments import Fragment, TimestampPolicy, fragment_and_send
from fairsim.infra.gateway import Gateway, SessionRegistry, gateway_transit
from fairsim.infra.routing import InterBookLink, route_cross_book
from fairsim.infra.switch import StoreAndForwardSwitch
from fairsim.infra.wire import WireMessage
from fairsim.kernel.events import Event
from fairsim.kernel.simulator import Kernel, SimulationError
from fairsim.kernel.time import SimTime
from fairsim.participants.models import Dispatch, Participant, Stimulus, StimulusKind, StrategyKind
from fairsim.participants.strategies import Agent, RestingMaker, build_agent, on_update
from fairsim.remediation.policies import (
    BatchPolicy,
    ConnectionLimitPolicy,
    Speedbump,
    apply_speedbump,
    set_connection_limit,
)
from fairsim.scenarios.config import ScenarioConfig
from fairsim.scenarios.stimuli import generate_stimuli


logger = logging.getLogger(__name__)

COMPONENT = "scenario"

LinkT = TypeVar("LinkT", Gateway, InterBookLink)


class ExchangeSimulation:
    """One isolated, single-threaded run of a scenario for one seed.

    Also acts as every engine's listener: accepted messages become race
    entries, fills of a stimulus's liquidity decide the race winner.
    """

    def __init__(self, config: ScenarioConfig, seed: int, record_trace: bool = True):
        self.config = config
        self.seed = seed
        self.kernel = Kernel(seed, record_trace)
        self.tracker = RaceTracker()
        self.trail = AuditTrail()
        self.logger = logging.getLogger(f"{__name__}.{self.__class__.__name__}")

        self._order_ids = itertools.count(1)
        self._update_ids = itertools.count(0)
        self._opportunity_orders: Dict[int, int] = {}
        self._stimulus_orders: Dict[int, int] = {}
        self._send_times: Dict[tuple, List[SimTime]] = {}
        self._copy_gateway: Dict[tuple, str] = {}
        self._blocked: Set[tuple] = set()
        self._windows: Dict[int, Set[int]] = {}

        self.batch_policy = self._build_batch_policy()
        self.connection_policy = self._build_connection_policy()
        self.speedbumps: Dict[str, Speedbump] = {
            attach_point: Speedbump(attach_point, delay)
            for attach_point, delay in config.remediation.speedbumps.items()
        }
        self.engines: Dict[str, MatchingEngine] = {
            book.id: MatchingEngine(
                book.id,
                self.kernel,
                OrderBook(book.id),
                timestamp_policy=config.engine.timestamp_policy,
                reassembly_timeout=config.engine.reassembly_timeout_ns,
                batch_policy=self.batch_policy,
                listener=self,
            )
            for book in config.books
        }
        self.gateways = self._build_gateways()
        self.links = self._build_links()
        self.registry = SessionRegistry(self.connection_policy.limit)
        self.participants: Dict[str, Participant] = {p.id: p.build() for p in config.participants}
        self.agents: Dict[str, Agent] = {
            pid: build_agent(p, self.next_order_id, self.kernel.rng(f"participant:{pid}"), config.engine.mtu)
            for pid, p in self.participants.items()
        }
        self.feeds = self._build_feeds()
        self._login_gateways()

        leads = [p.lead_ns for p in self.participants.values() if p.strategy is StrategyKind.OPTIMISTIC_MESSENGER]
        self._stimuli: Iterator[Stimulus] = generate_stimuli(
            config.stimuli, self.kernel.rng("stimuli"), min_gap=max(leads) + 1 if leads else 0
        )
        self.kernel.register(COMPONENT, self.handle)

    def next_order_id(self) -> int:
        return next(self._order_ids)

    @property
    def trades(self) -> List[Tuple[str, Trade]]:
        return self.trail.fills

    @property
    def duplicates(self) -> int:
        return sum(engine.duplicates for engine in self.engines.values())

    def _build_batch_policy(self) -> BatchPolicy:
        remediation = self.config.remediation
        window = remediation.batch_window_ns
        if window <= 0:
            return BatchPolicy()
        phase = 0
        if remediation.randomize_window_phase:
            phase = self.kernel.rng("remediation").integer(0, window)
            self.logger.info(f"Batch window phase drawn at {phase}ns")
        return BatchPolicy(window=window, enabled=True, phase=phase)

    def _build_connection_policy(self) -> ConnectionLimitPolicy:
        limit = self.config.remediation.connection_limit
        if limit is None:
            return ConnectionLimitPolicy()
        self.logger.info(f"Connection limit of {limit} sessions per participant")
        return set_connection_limit(limit)

    def _with_speedbump(self, link: LinkT) -> LinkT:
        bump = self.speedbumps.get(link.id)
        return apply_speedbump(link, bump.delay) if bump is not None else link

    def _build_gateways(self) -> Dict[str, Gateway]:
        gateways = {}
        for cfg in self.config.gateways:
            switch = StoreAndForwardSwitch(cfg.switch_link_rate) if cfg.switch_link_rate else None
            gateway = Gateway(cfg.id, cfg.engine, cfg.latency.build(), cfg.load_penalty_ns, switch)
            gateways[cfg.id] = self._with_speedbump(gateway)
        return gateways

    def _build_links(self) -> Dict[str, InterBookLink]:
        return {
            cfg.id: self._with_speedbump(InterBookLink(cfg.id, cfg.source, cfg.destination, cfg.latency.build()))
            for cfg in self.config.links
        }

    def _build_feeds(self) -> Dict[str, FeedServer]:
        feeds = {}
        for cfg in self.config.feeds:
            feed = FeedServer(cfg.id, cfg.book, cfg.build_policy())
            subscribers = [p for p in self.participants.values() if p.feed_subscription == cfg.id]
            if cfg.login_order is not None:
                named = [self.participants[pid] for pid in cfg.login_order]
                order = named + [p for p in subscribers if p.id not in cfg.login_order]
            else:
                # early-login participants take the first positions
                order = sorted(subscribers, key=lambda p: p.strategy is not StrategyKind.EARLY_LOGIN)
            for p in order:
                feed.login(p.id, p.squat_slots)
            feeds[cfg.id] = feed
        return feeds

    def _login_gateways(self) -> None:
        for p in self.participants.values():
            for gateway_id in p.connections:
                self.registry.login(p.id, gateway_id)

    def handle(self, event: Event) -> None:
        action, payload = event.action, event.payload
        if action == "stimulus":
            self._on_stimulus(payload)
        elif action == "anticipate":
            agent_id, stimulus = payload
            self._dispatch(self.agents[agent_id].anticipate(stimulus))
        elif action == "deliver":
            agent_id, update = payload
            self._dispatch(on_update(self.agents[agent_id], update, self.kernel.now))
        elif action == "send":
            self._on_send(*payload)
        elif action == "withdraw":
            self._on_withdraw(payload)
        else:
            raise SimulationError(f"Scenario got unknown action '{action}'")

    def _schedule_next(self) -> None:
        stimulus = next(self._stimuli, None)
        if stimulus is None:
            return
        self.kernel.call_at(stimulus.t_e, COMPONENT, "stimulus", stimulus)
        for pid, p in self.participants.items():
            if p.strategy is StrategyKind.OPTIMISTIC_MESSENGER:
                self.kernel.call_at(stimulus.t_e - p.lead_ns, COMPONENT, "anticipate", (pid, stimulus))

    def _on_stimulus(self, stimulus: Stimulus) -> None:
        opportunity = stimulus.opportunity
        engine = self.engines[opportunity.book]
        self.tracker.open(stimulus.id, stimulus.t_e, opportunity.book)

        order = NewOrder(
            self.next_order_id(), stimulus.owner or "", opportunity.side, opportunity.qty,
            opportunity.price, OrderKind.LIMIT, stimulus.id,
        )
        engine.inject(order)
        self._opportunity_orders[order.order_id] = stimulus.id
        self._stimulus_orders[stimulus.id] = order.order_id

        publish_book = opportunity.book
        if stimulus.kind is StimulusKind.STALE_QUOTE:
            maker = self.agents.get(stimulus.owner or "")
            if isinstance(maker, RestingMaker):
                maker.register_quote(order.order_id, stimulus.id)
        elif stimulus.kind is StimulusKind.ROUTED_ORDER:
            publish_book = self.config.stimuli.origin_book or publish_book
            self._route(stimulus)

        self._publish(MarketUpdate(
            next(self._update_ids), publish_book, stimulus.t_e, stimulus.id,
            opportunity.side, opportunity.price, opportunity.qty, order.order_id,
        ))
        self.kernel.call_at(stimulus.closes_at, COMPONENT, "withdraw", stimulus)
        self._schedule_next()

    def _route(self, stimulus: Stimulus) -> None:
        """An order entering the origin book is forwarded to the better-priced remote book."""
        cfg = self.config.stimuli
        link = self.links[cfg.link or ""]
        destination = self.engines[stimulus.opportunity.book]
        order = NewOrder(
            self.next_order_id(), cfg.origin, stimulus.opportunity.side.opposite,
            stimulus.opportunity.qty, kind=OrderKind.MARKET, stimulus_id=stimulus.id,
        )
        arrival = route_cross_book(
            order, self.engines[link.source].book, destination.book, link,
            stimulus.t_e, self.kernel.rng(f"link:{link.id}"),
        )
        if arrival is None:
            self.logger.warning(f"Stimulus {stimulus.id}: order {order.order_id} not routed")
            return
        wire = WireMessage(order)
        for send in fragment_and_send(wire, self.config.engine.mtu, [stimulus.t_e]):
            self._note_send(wire, stimulus.t_e, link.id)
            destination.deliver_at(arrival, send.fragment)

    def _publish(self, update: MarketUpdate) -> None:
        for feed in self.feeds.values():
            if feed.book != update.book:
                continue
            deliveries = feed.publish(update, self.kernel.rng(f"feed:{feed.id}"))
            self.trail.deliveries.extend(deliveries)
            for delivery in deliveries:
                if delivery.participant in self.agents:
                    self.kernel.call_at(delivery.t_receive, COMPONENT, "deliver", (delivery.participant, update))

    def _on_withdraw(self, stimulus: Stimulus) -> None:
        # keys recorded before this race opened belong to races already closed
        for engine in self.engines.values():
            engine.forget(stimulus.t_e)
        order_id = self._stimulus_orders[stimulus.id]
        engine = self.engines[stimulus.opportunity.book]
        maker = self.agents.get(stimulus.owner or "")
        if isinstance(maker, RestingMaker):
            maker.quotes.pop(order_id, None)
        if engine.book.resting(order_id) is None:
            return
        self.logger.debug(f"Race {stimulus.id} closed unclaimed; withdrawing order {order_id}")
        engine.inject(Cancel(self.next_order_id(), stimulus.owner or "", order_id, stimulus.id))

    def _dispatch(self, dispatches: List[Dispatch]) -> None:
        for dispatch in dispatches:
            for send in dispatch.sends:
                self.kernel.call_at(send.t_send, COMPONENT, "send", (dispatch.gateway_id, send.fragment))

    def _note_send(self, wire: WireMessage, t_send: SimTime, via: str) -> None:
        self._send_times.setdefault(wire.key(), []).append(t_send)
        self._copy_gateway[wire.key()] = via

    def _on_send(self, gateway_id: str, fragment: Fragment) -> None:
        wire = fragment.wire
        key = wire.key()
        if key in self._blocked:
            return
        if not self.registry.accepts(wire.participant, gateway_id):
            self._blocked.add(key)
            self.trail.drop("connection limit")
            return
        gateway = self.gateways[gateway_id]
        arrival = gateway_transit(gateway, wire, self.kernel.now, self.kernel.rng(f"gateway:{gateway_id}"))
        if arrival is None:
            self._blocked.add(key)
            self.trail.drop("truncated critical fields")
            return
        self._note_send(wire, self.kernel.now, gateway_id)
        self.engines[gateway.engine].deliver_at(arrival, fragment)

    def _profile(self, wire: WireMessage) -> Tuple[SimTime, bool, SimTime]:
        """Reaction time, colocation and minimum path delay of a message's sender."""
        via = self._copy_gateway.get(wire.key())
        participant = self.participants.get(wire.participant)
        if participant is None:
            link = self.links.get(via or "")
            floor = link.latency.minimum() + link.speedbump_ns if link else 0
            return 0, False, floor
        gateway = self.gateways.get(via or "")
        floor = gateway.minimum_delay(wire.participant) if gateway else 0
        return participant.reaction_time, participant.colocated, floor

    def message_accepted(self, engine_id: str, wire: WireMessage, priority_ts: SimTime) -> None:
        stimulus_id = wire.stimulus_id
        if stimulus_id is None or self.tracker.engine_of(stimulus_id) != engine_id:
            return
        reaction_time, colocated, floor = self._profile(wire)
        times = self._send_times.get(wire.key(), [priority_ts])
        first_stamp = self.engines[engine_id].timestamp_policy is TimestampPolicy.FIRST_FRAGMENT
        t_send = min(times) if first_stamp else max(times)
        recorded = self.tracker.arrival(
            stimulus_id, wire.participant, reaction_time, priority_ts, t_send, colocated, floor
        )
        if not recorded:
            return
        self.trail.submissions.append(
            Submission(stimulus_id, wire.participant, engine_id, t_send, priority_ts, colocated)
        )
        if self.batch_policy.active:
            self._windows.setdefault(stimulus_id, set()).add(self.batch_policy.window_index(self.kernel.now))

    def message_processed(self, engine_id: str, wire: Optional[WireMessage], result: MatchResult) -> None:
        tag = result.message.stimulus_id
        for trade in result.trades:
            self.trail.fills.append((engine_id, trade))
            stimulus_id = self._opportunity_orders.get(trade.maker_order)
            if wire is not None and stimulus_id is not None and stimulus_id == tag:
                self.tracker.win(stimulus_id, trade.taker_participant)
        if wire is not None and result.cancelled is not None:
            stimulus_id = self._opportunity_orders.get(result.cancelled.id)
            if stimulus_id is not None and stimulus_id == tag:
                self.tracker.win(stimulus_id, result.message.participant)

    def message_dropped(self, engine_id: str, wire: WireMessage, reason: str) -> None:
        self.logger.debug(f"Engine {engine_id} dropped message {wire.message_id} from {wire.participant}: {reason}")
        self.trail.drop(reason)

    def run(self) -> List[RaceRecord]:
        """Run every stimulus to completion and return the race records."""
        self._schedule_next()
        self.kernel.run()
        records = self.tracker.records()
        for record in records:
            if len(self._windows.get(record.stimulus_id, ())) > 1:
                record.straddles_window = True
        return records
