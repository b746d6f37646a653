"""Single scenario runs."""

import logging
import time
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

from fairsim.auditor.races import RaceRecord
from fairsim.auditor.report import FairnessReport, build_report
from fairsim.book.models import Trade
from fairsim.kernel.events import EventTrace
from fairsim.scenarios.config import ScenarioConfig, validate_topology
from fairsim.scenarios.simulation import ExchangeSimulation


logger = logging.getLogger(__name__)


@dataclass
class ScenarioResult:
    """Everything one run produced."""
    config: ScenarioConfig
    seed: int
    trace: EventTrace
    races: List[RaceRecord]
    report: FairnessReport
    trades: List[Tuple[str, Trade]] = field(default_factory=list)


def run_scenario(
    config: ScenarioConfig,
    seed: Optional[int] = None,
    races: Optional[int] = None,
    record_trace: bool = True,
) -> ScenarioResult:
    """Run one complete simulation and audit it.

    Args:
        config: Validated scenario
        seed: Master seed (defaults to the scenario's first seed)
        races: Override for the number of stimuli
        record_trace: Keep the full event trace (the digest is always computed)

    Returns:
        ScenarioResult with the trace, race records, trades and report

    Raises:
        TopologyError: If the scenario references undeclared components
    """
    validate_topology(config)
    config = config.with_race_count(races)
    seed = config.seeds[0] if seed is None else seed

    started = time.perf_counter()
    logger.info(f"Running {config.name} seed={seed} stimuli={config.stimuli.count}")
    simulation = ExchangeSimulation(config, seed, record_trace=True)
    records = simulation.run()
    trace = simulation.kernel.trace

    report = build_report(
        records,
        simulation.trail,
        config.audit.epsilon_ns,
        config.audit.deltas,
        scenario=config.name,
        seed=seed,
        config_hash=config.config_hash(),
        trace_digest=trace.digest(),
        duplicates_discarded=simulation.duplicates,
        resolved_config=config.resolved(),
    )
    logger.info(
        f"Finished {config.name} seed={seed}: {report.races} races in "
        f"{time.perf_counter() - started:.2f}s"
    )
    if not record_trace:
        trace = EventTrace()
    return ScenarioResult(config, seed, trace, records, report, list(simulation.trades))
