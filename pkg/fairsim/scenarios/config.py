"""Scenario schema, loading and topology validation."""

import hashlib
import json
import logging
from enum import Enum
from importlib import resources
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import yaml
from pydantic import BaseModel, ConfigDict, Field, NonNegativeInt, ValidationError, model_validator

from fairsim.auditor.metrics import DEFAULT_DELTAS
from fairsim.book.models import Side
from fairsim.infra.feed import FeedKind, FeedPolicy
from fairsim.infra.fragments import DEFAULT_MTU, DEFAULT_REASSEMBLY_TIMEOUT, TimestampPolicy, fragment_count
from fairsim.infra.latency import LatencyKind, LatencyModel, missing_params
from fairsim.infra.wire import DEFAULT_MESSAGE_BYTES
from fairsim.kernel.time import MS
from fairsim.participants.models import Participant, StimulusKind, StrategyKind
from fairsim.scenarios.errors import ScenarioError, ScenarioValidationError, TopologyError


logger = logging.getLogger(__name__)

BUNDLED_PACKAGE = "fairsim.scenarios"
BUNDLED_DIR = "data"


class _Model(BaseModel):
    model_config = ConfigDict(extra="forbid", use_enum_values=False)


class LatencyConfig(_Model):
    kind: LatencyKind = LatencyKind.CONSTANT
    base_ns: int = Field(0, ge=0)
    params: Dict[str, float] = Field(default_factory=dict)
    port_offsets_ns: Dict[str, int] = Field(default_factory=dict)

    @model_validator(mode="after")
    def _check_params(self) -> "LatencyConfig":
        missing = missing_params(self.kind, self.params)
        if missing:
            raise ValueError(f"params for kind '{self.kind.value}' missing {missing}")
        return self

    def build(self) -> LatencyModel:
        return LatencyModel(self.kind, self.base_ns, dict(self.params), dict(self.port_offsets_ns))


class ParticipantConfig(_Model):
    id: str
    reaction_time_ns: int = Field(ge=0)
    strategy: StrategyKind = StrategyKind.HONEST_RACER
    gateways: List[str] = Field(default_factory=list)
    feed: Optional[str] = None
    colocated: bool = True
    message_bytes: int = Field(DEFAULT_MESSAGE_BYTES, gt=0)
    lead_ns: int = Field(0, ge=0)
    abort_rate: float = Field(0.0, ge=0.0, le=1.0)
    truncated_bytes: Optional[int] = Field(None, gt=0)
    truncate_critical: bool = False
    squat_slots: int = Field(0, ge=0)

    def build(self) -> Participant:
        return Participant(
            id=self.id,
            reaction_time=self.reaction_time_ns,
            strategy=self.strategy,
            connections=tuple(self.gateways),
            feed_subscription=self.feed,
            colocated=self.colocated,
            message_bytes=self.message_bytes,
            lead_ns=self.lead_ns,
            abort_rate=self.abort_rate,
            truncated_bytes=self.truncated_bytes,
            truncate_critical=self.truncate_critical,
            squat_slots=self.squat_slots,
        )


class GatewayConfig(_Model):
    id: str
    engine: str
    latency: LatencyConfig = Field(default_factory=LatencyConfig)
    load_penalty_ns: int = Field(0, ge=0)
    switch_link_rate: Optional[float] = Field(None, gt=0, description="bytes per ns")


class BookConfig(_Model):
    id: str


class LinkConfig(_Model):
    id: str
    source: str
    destination: str
    latency: LatencyConfig = Field(default_factory=LatencyConfig)


class FeedConfig(_Model):
    id: str
    book: str
    policy: FeedKind = FeedKind.MULTICAST_JITTER
    per_recipient_cost_ns: int = Field(0, ge=0)
    jitter: LatencyConfig = Field(default_factory=LatencyConfig)
    login_order: Optional[List[str]] = None

    def build_policy(self) -> FeedPolicy:
        return FeedPolicy(self.policy, self.per_recipient_cost_ns, self.jitter.build())


class EngineConfig(_Model):
    timestamp_policy: TimestampPolicy = TimestampPolicy.FIRST_FRAGMENT
    reassembly_timeout_ns: int = Field(DEFAULT_REASSEMBLY_TIMEOUT, gt=0)
    mtu: int = Field(DEFAULT_MTU, gt=0)


class RemediationConfig(_Model):
    speedbumps: Dict[str, NonNegativeInt] = Field(default_factory=dict, description="gateway or link id -> ns")
    batch_window_ns: int = Field(0, ge=0)
    randomize_window_phase: bool = False
    connection_limit: Optional[int] = Field(None, ge=1)


class OpportunityConfig(_Model):
    book: str
    side: Side = Side.ASK
    price: int = 100
    qty: int = Field(1, gt=0)


class ScheduleKind(str, Enum):
    POISSON = "poisson"
    FIXED = "fixed"


class StimuliConfig(_Model):
    count: int = Field(1000, ge=0)
    kind: StimulusKind = StimulusKind.OPPORTUNITY
    schedule: ScheduleKind = ScheduleKind.POISSON
    start_ns: int = Field(MS, ge=0)
    mean_interarrival_ns: int = Field(MS, gt=0)
    horizon_ns: int = Field(10 * MS, gt=0)
    opportunity: OpportunityConfig
    owner: Optional[str] = None
    origin: str = "router"
    origin_book: Optional[str] = None
    link: Optional[str] = None


class AuditConfig(_Model):
    epsilon_ns: int = Field(0, ge=0)
    deltas: List[float] = Field(default_factory=lambda: list(DEFAULT_DELTAS))

    @model_validator(mode="after")
    def _check_deltas(self) -> "AuditConfig":
        if any(not 0.0 < d <= 1.0 for d in self.deltas):
            raise ValueError("deltas must lie in (0, 1]")
        return self


class ScenarioConfig(_Model):
    """A complete, self-describing experiment.

    Together with a seed it fully determines a run; :meth:`resolved` echoes
    every default.
    """
    name: str
    description: str = ""
    participants: List[ParticipantConfig]
    gateways: List[GatewayConfig] = Field(default_factory=list)
    books: List[BookConfig]
    links: List[LinkConfig] = Field(default_factory=list)
    feeds: List[FeedConfig] = Field(default_factory=list)
    engine: EngineConfig = Field(default_factory=EngineConfig)
    remediation: RemediationConfig = Field(default_factory=RemediationConfig)
    stimuli: StimuliConfig
    audit: AuditConfig = Field(default_factory=AuditConfig)
    seeds: List[int] = Field(default_factory=lambda: [0])

    def resolved(self) -> Dict[str, Any]:
        return self.model_dump(mode="json")

    def config_hash(self) -> str:
        canonical = json.dumps(self.resolved(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()

    def participant(self, participant_id: str) -> ParticipantConfig:
        for p in self.participants:
            if p.id == participant_id:
                return p
        raise KeyError(participant_id)

    def with_race_count(self, races: Optional[int]) -> "ScenarioConfig":
        if races is None:
            return self
        return self.model_copy(update={"stimuli": self.stimuli.model_copy(update={"count": races})})


def _unique(kind: str, ids: List[str]) -> None:
    seen = set()
    for i in ids:
        if i in seen:
            raise TopologyError(f"Duplicate {kind} id '{i}'")
        seen.add(i)


def validate_topology(config: ScenarioConfig) -> None:
    """Reject references to components the scenario does not declare.

    Raises:
        TopologyError: On the first inconsistency found
    """
    participants = {p.id: p for p in config.participants}
    gateways = {g.id: g for g in config.gateways}
    books = {b.id for b in config.books}
    links = {link.id: link for link in config.links}
    feeds = {f.id: f for f in config.feeds}
    _unique("participant", [p.id for p in config.participants])
    _unique("gateway", [g.id for g in config.gateways])
    _unique("book", [b.id for b in config.books])
    _unique("link", [link.id for link in config.links])
    _unique("feed", [f.id for f in config.feeds])

    for gw in config.gateways:
        if gw.engine not in books:
            raise TopologyError(f"Gateway '{gw.id}' references unknown book '{gw.engine}'")
    for link in config.links:
        for end in (link.source, link.destination):
            if end not in books:
                raise TopologyError(f"Link '{link.id}' references unknown book '{end}'")
    for feed in config.feeds:
        if feed.book not in books:
            raise TopologyError(f"Feed '{feed.id}' references unknown book '{feed.book}'")
        for pid in feed.login_order or []:
            if pid not in participants:
                raise TopologyError(f"Feed '{feed.id}' login order names unknown participant '{pid}'")

    max_lead = 0
    for p in config.participants:
        if not p.gateways:
            raise TopologyError(f"Participant '{p.id}' has no gateways")
        for gw_id in p.gateways:
            if gw_id not in gateways:
                raise TopologyError(f"Participant '{p.id}' references unknown gateway '{gw_id}'")
        if p.feed is not None and p.feed not in feeds:
            raise TopologyError(f"Participant '{p.id}' references unknown feed '{p.feed}'")
        if p.strategy is StrategyKind.REPLICATOR and len(p.gateways) < 2:
            raise TopologyError(f"Replicator '{p.id}' needs at least two gateways")
        if p.strategy is StrategyKind.OPTIMISTIC_MESSENGER:
            if p.lead_ns <= 0:
                raise TopologyError(f"Optimistic messenger '{p.id}' needs lead_ns > 0")
            if p.feed is None:
                raise TopologyError(f"Optimistic messenger '{p.id}' needs a feed")
            if fragment_count(p.message_bytes, config.engine.mtu) < 2:
                raise TopologyError(
                    f"Optimistic messenger '{p.id}': message of {p.message_bytes} bytes fits one "
                    f"fragment at mtu {config.engine.mtu}"
                )
            max_lead = max(max_lead, p.lead_ns)

    for attach_point in config.remediation.speedbumps:
        if attach_point not in gateways and attach_point not in links:
            raise TopologyError(f"Speedbump attached to unknown gateway or link '{attach_point}'")

    stimuli = config.stimuli
    if stimuli.opportunity.book not in books:
        raise TopologyError(f"Opportunity references unknown book '{stimuli.opportunity.book}'")
    if stimuli.start_ns < max_lead:
        raise TopologyError(f"stimuli.start_ns {stimuli.start_ns} is earlier than lead {max_lead}")
    if stimuli.kind is StimulusKind.STALE_QUOTE:
        owner = participants.get(stimuli.owner or "")
        if owner is None or owner.strategy is not StrategyKind.RESTING_MAKER:
            raise TopologyError("stale_quote stimuli need an owner that is a resting-maker participant")
    if stimuli.kind is StimulusKind.ROUTED_ORDER:
        link = links.get(stimuli.link or "")
        if link is None:
            raise TopologyError(f"routed_order stimuli reference unknown link '{stimuli.link}'")
        if stimuli.origin_book not in books:
            raise TopologyError(f"routed_order origin book '{stimuli.origin_book}' is unknown")
        if (link.source, link.destination) != (stimuli.origin_book, stimuli.opportunity.book):
            raise TopologyError(
                f"Link '{link.id}' does not connect {stimuli.origin_book} to {stimuli.opportunity.book}"
            )
        if stimuli.origin in participants:
            raise TopologyError(f"Routed-order origin '{stimuli.origin}' collides with a participant id")


def _format_location(loc: tuple) -> str:
    return ".".join(str(part) for part in loc) or "<root>"


def parse_scenario(data: Dict[str, Any], source: str = "<dict>") -> ScenarioConfig:
    """Validate a scenario document.

    Raises:
        ScenarioValidationError: With the dotted path of every schema violation
        TopologyError: If the document references undeclared components
    """
    try:
        config = ScenarioConfig.model_validate(data)
    except ValidationError as e:
        errors = [(_format_location(err["loc"]), err["msg"]) for err in e.errors()]
        raise ScenarioValidationError(f"Invalid scenario {source}", errors) from e
    validate_topology(config)
    return config


def bundled_scenarios() -> List[str]:
    """Names of the scenarios shipped with the package."""
    data = resources.files(BUNDLED_PACKAGE).joinpath(BUNDLED_DIR)
    return sorted(
        entry.name[: -len(".json")] for entry in data.iterdir() if entry.name.endswith(".json")
    )


def _read_document(path: Path) -> Dict[str, Any]:
    with open(path, "r", encoding="utf-8") as f:
        if path.suffix in [".yaml", ".yml"]:
            document = yaml.safe_load(f) or {}
        elif path.suffix == ".json":
            document = json.load(f)
        else:
            raise ScenarioError(f"Unsupported scenario format '{path.suffix}' for {path}")
    if not isinstance(document, dict):
        raise ScenarioValidationError(f"Scenario {path} must be a mapping at top level")
    return document


def load_scenario(source: Union[str, Path]) -> ScenarioConfig:
    """Load a scenario from a JSON/YAML path or a bundled scenario name.

    Raises:
        ScenarioError: If the file is missing or unreadable
        ScenarioValidationError: On schema violations
        TopologyError: On inconsistent references
    """
    path = Path(source)
    if path.exists():
        try:
            document = _read_document(path)
        except (json.JSONDecodeError, yaml.YAMLError) as e:
            raise ScenarioValidationError(f"Cannot parse {path}: {e}") from e
        return parse_scenario(document, str(path))

    name = str(source)
    if name in bundled_scenarios():
        data = resources.files(BUNDLED_PACKAGE).joinpath(BUNDLED_DIR)
        text = data.joinpath(f"{name}.json").read_text(encoding="utf-8")
        return parse_scenario(json.loads(text), name)
    raise ScenarioError(f"Scenario '{source}' not found (no such file or bundled scenario)")
